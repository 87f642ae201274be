// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "violet/core/errors.hpp"

namespace violet::harness {

namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

struct Field {
  Getter get;
  Setter set;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, text));
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, text));
}

std::string show(double v) { return fmt::format("{}", v); }

// Field accessor built from a projection onto the config.
template <class T, class Proj>
Field field(Proj proj) {
  Field f;
  f.get = [proj](const ExperimentConfig& c) {
    const T& v = proj(const_cast<ExperimentConfig&>(c));
    if constexpr (std::is_same_v<T, bool>)
      return std::string(v ? "true" : "false");
    else if constexpr (std::is_same_v<T, std::string>)
      return v;
    else if constexpr (std::is_floating_point_v<T>)
      return show(v);
    else
      return std::to_string(v);
  };
  f.set = [proj](ExperimentConfig& c, std::string_view text) {
    T& v = proj(c);
    if constexpr (std::is_same_v<T, bool>)
      v = parse_bool("value", text);
    else if constexpr (std::is_same_v<T, std::string>)
      v = std::string(text);
    else
      v = parse_number<T>("value", text);
  };
  return f;
}

#define VIOLET_FIELD(T, expr) field<T>([](ExperimentConfig& c) -> T& { return expr; })

const std::map<std::string, Field, std::less<>>& registry() {
  static const std::map<std::string, Field, std::less<>> fields = [] {
    std::map<std::string, Field, std::less<>> f;
    f["seed"] = VIOLET_FIELD(std::uint64_t, c.seed);

    f["data.clips"] = VIOLET_FIELD(int, c.data.clips);
    f["data.frames_per_clip"] = VIOLET_FIELD(int, c.data.frames_per_clip);
    f["data.resolution"] = VIOLET_FIELD(int, c.data.resolution);
    f["data.patch"] = VIOLET_FIELD(int, c.data.patch);
    f["data.min_objects"] = VIOLET_FIELD(int, c.data.min_objects);
    f["data.max_objects"] = VIOLET_FIELD(int, c.data.max_objects);
    f["data.twins"] = VIOLET_FIELD(bool, c.data.twins);
    f["data.unique_captions"] = VIOLET_FIELD(bool, c.data.unique_captions);
    f["data.frames"] = VIOLET_FIELD(int, c.data.frames);
    f["data.vocab_size"] = VIOLET_FIELD(int, c.data.vocab_size);
    f["data.eval_fraction"] = VIOLET_FIELD(double, c.data.eval_fraction);
    f["data.pretrain_fraction"] = VIOLET_FIELD(double, c.data.pretrain_fraction);
    f["data.manifest"] = VIOLET_FIELD(std::string, c.data.manifest);

    f["tokenizer.path"] = VIOLET_FIELD(std::string, c.tokenizer_path);
    f["tokenizer.K"] = VIOLET_FIELD(int, c.tokenizer.K);
    f["tokenizer.hidden"] = VIOLET_FIELD(int, c.tokenizer.hidden);
    f["tokenizer.code_dim"] = VIOLET_FIELD(int, c.tokenizer.code_dim);
    f["tokenizer.steps"] = VIOLET_FIELD(int, c.tokenizer.steps);
    f["tokenizer.batch"] = VIOLET_FIELD(int, c.tokenizer.batch);
    f["tokenizer.lr"] = VIOLET_FIELD(double, c.tokenizer.lr);
    f["tokenizer.commitment"] = VIOLET_FIELD(double, c.tokenizer.commitment);

    f["encoder.variant"] = Field{
        [](const ExperimentConfig& c) { return std::string(video::variant_name(c.model.video.variant)); },
        [](ExperimentConfig& c, std::string_view v) { c.model.video.variant = video::parse_variant(v); }};
    f["encoder.d"] = VIOLET_FIELD(int, c.model.video.d);
    f["encoder.depth"] = VIOLET_FIELD(int, c.model.video.depth);
    f["encoder.heads"] = VIOLET_FIELD(int, c.model.video.heads);
    f["encoder.window_t"] = VIOLET_FIELD(int, c.model.video.window.t);
    f["encoder.window_h"] = VIOLET_FIELD(int, c.model.video.window.h);
    f["encoder.window_w"] = VIOLET_FIELD(int, c.model.video.window.w);
    f["encoder.shift"] = VIOLET_FIELD(bool, c.model.video.shift);
    f["encoder.pad_windows"] = VIOLET_FIELD(bool, c.model.video.pad_windows);

    f["ct.d"] = VIOLET_FIELD(int, c.model.ct.d);
    f["ct.depth"] = VIOLET_FIELD(int, c.model.ct.depth);
    f["ct.heads"] = VIOLET_FIELD(int, c.model.ct.heads);
    f["ct.l_max"] = VIOLET_FIELD(int, c.model.ct.l_max);
    f["ct.segment_embedding"] = VIOLET_FIELD(bool, c.model.ct.segment_embedding);
    f["model.num_answers"] = VIOLET_FIELD(int, c.model.num_answers);

    f["pretrain.strategy"] = Field{
        [](const ExperimentConfig& c) { return std::string(pretrain::strategy_name(c.pretrain.strategy)); },
        [](ExperimentConfig& c, std::string_view v) { c.pretrain.strategy = pretrain::parse_strategy(v); }};
    f["mvm.variant"] = Field{
        [](const ExperimentConfig& c) { return std::string(pretrain::visual_objective_name(c.pretrain.visual)); },
        [](ExperimentConfig& c, std::string_view v) { c.pretrain.visual = pretrain::parse_visual_objective(v); }};
    f["pretrain.rate"] = VIOLET_FIELD(double, c.pretrain.rate);
    f["pretrain.lambda_mlm"] = VIOLET_FIELD(double, c.pretrain.lambda_mlm);
    f["pretrain.lambda_vtm"] = VIOLET_FIELD(double, c.pretrain.lambda_vtm);
    f["pretrain.lambda_visual"] = VIOLET_FIELD(double, c.pretrain.lambda_visual);
    f["pretrain.use_text"] = VIOLET_FIELD(bool, c.pretrain.use_text);
    f["pretrain.batch"] = VIOLET_FIELD(int, c.pretrain_batch);
    f["pretrain.block_rows"] = VIOLET_FIELD(int, c.pretrain.blocks.max_rows);
    f["pretrain.block_cols"] = VIOLET_FIELD(int, c.pretrain.blocks.max_cols);
    f["pretrain.block_frames"] = VIOLET_FIELD(int, c.pretrain.blocks.max_frames);
    f["pretrain.p_mask"] = VIOLET_FIELD(double, c.pretrain.text_actions.p_mask);
    f["pretrain.p_random"] = VIOLET_FIELD(double, c.pretrain.text_actions.p_random);
    f["pretrain.attention_layer"] = VIOLET_FIELD(int, c.pretrain.attention_layer);

    f["optim.lr"] = VIOLET_FIELD(double, c.optim.lr);
    f["optim.beta1"] = VIOLET_FIELD(double, c.optim.beta1);
    f["optim.beta2"] = VIOLET_FIELD(double, c.optim.beta2);
    f["optim.eps"] = VIOLET_FIELD(double, c.optim.eps);
    f["optim.weight_decay"] = VIOLET_FIELD(double, c.optim.weight_decay);
    f["optim.grad_clip"] = VIOLET_FIELD(double, c.optim.grad_clip);

    f["schedule.stages"] =
        Field{[](const ExperimentConfig& c) { return format_stages(c.stages); },
              [](ExperimentConfig& c, std::string_view v) { c.stages = parse_stages(v); }};

    f["finetune.steps"] = VIOLET_FIELD(int, c.finetune.steps);
    f["finetune.batch"] = VIOLET_FIELD(int, c.finetune.batch);
    f["finetune.lr"] = VIOLET_FIELD(double, c.finetune.lr);
    f["finetune.mc_options"] = VIOLET_FIELD(int, c.finetune.mc_options);
    return f;
  }();
  return fields;
}

#undef VIOLET_FIELD

const Field& lookup(std::string_view key) {
  const auto& reg = registry();
  const auto it = reg.find(key);
  if (it == reg.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  return it->second;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.tokenizer.K = 64;
  c.tokenizer.hidden = 64;
  c.tokenizer.code_dim = 16;
  c.tokenizer.steps = 1500;
  c.tokenizer.batch = 128;

  auto& v = c.model.video;
  v.d = 32;
  v.depth = 2;
  v.heads = 2;
  v.window = {2, 2, 2};
  auto& ct = c.model.ct;
  ct.d = 32;
  ct.depth = 2;
  ct.heads = 2;
  ct.l_max = 32;
  c.model.num_answers = 16;
  // Desk-scale training starts from random weights, so the rate is far above
  // the large-scale value while betas and decay keep theirs.
  c.optim.lr = 1e-3;
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : registry()) keys.push_back(k);
  return keys;
}

void set_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const Field& f = lookup(key);
  try {
    f.set(cfg, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", key, e.what()));
  }
}

std::string get_value(const ExperimentConfig& cfg, std::string_view key) { return lookup(key).get(cfg); }

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
    try {
      set_value(base, trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, f] : registry()) out += fmt::format("{} = {}\n", k, f.get(cfg));
  return out;
}

void write_resolved_config(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / "resolved-config");
  if (!f) throw DataError("cannot write " + (dir / "resolved-config").string());
  f << to_text(cfg);
}

void validate(const ExperimentConfig& cfg) {
  const auto& d = cfg.data;
  if (d.patch <= 0 || d.resolution % d.patch != 0) throw ConfigError("data.resolution must be a multiple of data.patch");
  if (d.frames < 1) throw ConfigError("data.frames must be at least 1");
  if (d.eval_fraction <= 0.0 || d.eval_fraction >= 1.0) throw ConfigError("data.eval_fraction must lie in (0, 1)");
  if (d.pretrain_fraction <= 0.0 || d.pretrain_fraction > 1.0)
    throw ConfigError("data.pretrain_fraction must lie in (0, 1]");
  if (cfg.model.video.d != cfg.model.ct.d) throw ConfigError("encoder.d and ct.d must match");
  if (cfg.pretrain_batch < 1) throw ConfigError("pretrain.batch must be positive");
  if (cfg.pretrain.rate <= 0.0 || cfg.pretrain.rate > 1.0) throw ConfigError("pretrain.rate must lie in (0, 1]");
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    if (cfg.stages[i].steps < 0) throw ConfigError("stage steps must be non-negative");
    for (std::size_t j = 0; j < i; ++j)
      if (cfg.stages[i].name == cfg.stages[j].name) throw ConfigError("duplicate stage '" + cfg.stages[i].name + "'");
  }
  if (cfg.finetune.mc_options < 2) throw ConfigError("finetune.mc_options must be at least 2");
}

std::string format_stages(const std::vector<Stage>& stages) {
  std::string out;
  for (const auto& s : stages) {
    if (!out.empty()) out += ',';
    out += fmt::format("{}:{}:{}", s.name, s.steps, s.text_noise);
  }
  return out;
}

std::vector<Stage> parse_stages(std::string_view text) {
  std::vector<Stage> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream pin(item);
    std::string p;
    while (std::getline(pin, p, ':')) parts.push_back(trim(p));
    if (parts.size() < 2 || parts.size() > 3 || parts[0].empty())
      throw ConfigError("stage '" + item + "' must read name:steps[:text_noise]");
    Stage s;
    s.name = parts[0];
    s.steps = parse_number<int>("stage steps", parts[1]);
    if (parts.size() == 3) s.text_noise = parse_number<double>("stage noise", parts[2]);
    if (s.text_noise < 0.0 || s.text_noise > 1.0) throw ConfigError("stage noise must lie in [0, 1]");
    out.push_back(s);
  }
  return out;
}

}  // namespace violet::harness
