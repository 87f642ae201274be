// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// violet: command-line front end for corpus synthesis, tokenizer training,
// pretraining, finetuning, evaluation and ablations.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "violet/core/errors.hpp"
#include "violet/data/corpus_io.hpp"
#include "violet/harness/ablation.hpp"

namespace fs = std::filesystem;
using namespace violet;
using namespace violet::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = "runs";
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("--config", c.config, "flat key = value config file");
  cmd->add_option("--set", c.overrides, "override one key, as key=value (repeatable)");
  if (with_out) cmd->add_option("--out", c.out, "output directory")->capture_default_str();
}

ExperimentConfig resolve(const Common& c, const std::optional<std::string>& fallback_text = std::nullopt) {
  ExperimentConfig cfg = default_config();
  if (!c.config.empty())
    cfg = load_config(c.config);
  else if (fallback_text)
    cfg = parse_config(*fallback_text);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  for (const auto& l : lines) f << l << '\n';
}

void print_records(const std::vector<downstream::EvalRecord>& records) {
  for (const auto& r : records) std::cout << downstream::to_json_line(r) << '\n';
}

void cmd_data_synth(const Common& c, const std::string& format) {
  const auto cfg = resolve(c);
  if (!cfg.data.manifest.empty()) throw ConfigError("data synth writes a procedural corpus; unset data.manifest");
  const Workspace ws = build_workspace(cfg);
  std::vector<data::VideoClip> clips;
  for (const auto& s : ws.train) clips.push_back(s.clip);
  for (const auto& s : ws.held_out) clips.push_back(s.clip);
  const auto fmt = format == "vclip" ? data::FrameFormat::Container : data::FrameFormat::PpmDirectory;
  const auto manifest = data::write_corpus(c.out, clips, fmt);
  write_resolved_config(c.out, cfg);
  spdlog::info("wrote {} clips to {}", clips.size(), manifest.string());
}

void cmd_tokenizer_train(const Common& c, const std::string& path) {
  const auto cfg = resolve(c);
  const Workspace ws = build_workspace(cfg);
  tokenizer::TrainTrace trace;
  const auto tok = train_tokenizer(cfg, ws, &trace);
  std::vector<data::Frame> held;
  for (const auto& s : ws.held_out) held.insert(held.end(), s.clip.frames.begin(), s.clip.frames.end());
  const fs::path out = path.empty() ? fs::path(c.out) / "tokenizer.bin" : fs::path(path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  tok.save(out);
  write_resolved_config(out.has_parent_path() ? out.parent_path() : fs::path("."), cfg);
  spdlog::info("tokenizer saved to {}; held-out reconstruction MSE {:.5f}", out.string(), tok.reconstruction_mse(held));
}

void cmd_tokenizer_encode(const std::string& tok_path, const std::string& manifest, int frames, int patch) {
  const auto tok = tokenizer::VisualTokenizer::load(tok_path);
  for (const auto& desc : data::load_manifest(manifest)) {
    const auto clip = data::load_clip(desc);
    const auto grid = data::patchify(data::sample_frames(clip, frames), patch);
    const auto ids = tok.tokenize(grid);
    nlohmann::json j;
    j["clip_id"] = desc.clip_id;
    j["frames"] = ids.frames;
    j["rows"] = ids.rows;
    j["cols"] = ids.cols;
    j["ids"] = ids.ids;
    std::cout << j.dump() << '\n';
  }
}

void cmd_pretrain(const Common& c) {
  const auto cfg = resolve(c);
  write_resolved_config(c.out, cfg);
  const auto result = run_pretrain(cfg);
  std::vector<std::string> lines;
  for (const auto& r : result.trace) lines.push_back(to_json_line(r));
  write_lines(fs::path(c.out) / "trace.jsonl", lines);
  save_checkpoint(fs::path(c.out) / "pretrain.ckpt", result.checkpoint);
  if (!result.trace.empty())
    spdlog::info("pretraining done: {} steps, first loss {:.4f}, last loss {:.4f}", result.trace.size(),
                 result.trace.front().report.total, result.trace.back().report.total);
}

void cmd_finetune(const Common& c, const std::string& task_name, const std::string& ckpt_path) {
  const auto task = downstream::parse_task(task_name);
  std::optional<Checkpoint> pre;
  if (!ckpt_path.empty()) pre = load_checkpoint(ckpt_path);
  const auto cfg = resolve(c, pre ? std::optional(pre->config_text) : std::nullopt);
  write_resolved_config(c.out, cfg);
  const auto result = run_finetune(cfg, task, pre ? &*pre : nullptr);
  save_checkpoint(fs::path(c.out) / ("finetune-" + task_name + ".ckpt"), result.checkpoint);
  downstream::write_jsonl(fs::path(c.out) / ("metrics-" + task_name + ".jsonl"), result.held_out_metrics);
  downstream::write_csv(fs::path(c.out) / ("metrics-" + task_name + ".csv"), result.held_out_metrics);
  print_records(result.held_out_metrics);
}

void cmd_eval(const Common& c, const std::string& task_name, const std::string& ckpt_path, bool zero_shot) {
  const auto task = downstream::parse_task(task_name);
  const auto ckpt = load_checkpoint(ckpt_path);
  const auto cfg = resolve(c, ckpt.config_text);
  write_resolved_config(c.out, cfg);
  const auto records = run_eval(cfg, task, ckpt, zero_shot);
  downstream::write_jsonl(fs::path(c.out) / ("eval-" + task_name + ".jsonl"), records);
  downstream::write_csv(fs::path(c.out) / ("eval-" + task_name + ".csv"), records);
  print_records(records);
}

void cmd_ablate(const Common& c, const std::string& axis_text, const std::vector<std::uint64_t>& seeds,
               bool no_pretrain) {
  const auto axis = parse_axis(axis_text);
  const auto cfg = resolve(c);
  write_resolved_config(c.out, cfg);
  AblationSettings s;
  if (!seeds.empty()) s.seeds = seeds;
  s.pretrain = !no_pretrain;
  std::optional<tokenizer::VisualTokenizer> tok;
  bool needs_tokenizer = false;
  for (const auto& arm : ablation_arms(axis))
    needs_tokenizer |= s.pretrain && apply_arm(cfg, axis, arm).pretrain.visual != pretrain::VisualObjective::Off;
  if (needs_tokenizer) {
    if (!cfg.tokenizer_path.empty())
      tok.emplace(tokenizer::VisualTokenizer::load(cfg.tokenizer_path));
    else
      tok.emplace(train_tokenizer(cfg, build_workspace(cfg)));
  }
  const auto table = run_ablation(cfg, axis, s, tok ? &*tok : nullptr);
  std::vector<std::string> lines;
  for (const auto& run : table.runs) {
    nlohmann::json j;
    j["arm"] = run.arm;
    j["seed"] = run.seed;
    j["metrics"] = run.metrics;
    lines.push_back(j.dump());
  }
  write_lines(fs::path(c.out) / "runs.jsonl", lines);
  std::ofstream(fs::path(c.out) / "table.md") << table.to_markdown();
  std::cout << table.to_markdown();
  // Ordinal outcomes are findings, not errors, so they never change the exit code.
  for (const auto& check : ordinal_checks(table, cfg.finetune.mc_options))
    std::cout << (check.pass ? "holds  " : "fails  ") << check.name << "  (" << check.detail << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"violet: video-language transformer toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  Common data_c, tok_c, pre_c, ft_c, eval_c, abl_c;
  std::string format = "ppm", tok_out, tok_path, manifest, task, ckpt, axis;
  int frames = 4, patch = 8;
  bool zero_shot = false, no_pretrain = false;
  std::vector<std::uint64_t> seeds;

  auto* data_cmd = app.add_subcommand("data", "corpus tools")->require_subcommand(1);
  auto* synth = data_cmd->add_subcommand("synth", "write the procedural corpus as PPM frames or .vclip files");
  add_common(synth, data_c);
  synth->add_option("--format", format, "ppm or vclip")->check(CLI::IsMember({"ppm", "vclip"}));

  auto* tok_cmd = app.add_subcommand("tokenizer", "visual tokenizer")->require_subcommand(1);
  auto* tok_train = tok_cmd->add_subcommand("train", "train the tokenizer on the training split");
  add_common(tok_train, tok_c);
  tok_train->add_option("--save", tok_out, "tokenizer file (default <out>/tokenizer.bin)");
  auto* tok_encode = tok_cmd->add_subcommand("encode", "print visual-token ids for every clip of a manifest");
  tok_encode->add_option("--tokenizer", tok_path, "tokenizer file")->required();
  tok_encode->add_option("--manifest", manifest, "corpus manifest")->required();
  tok_encode->add_option("--frames", frames, "frames sampled per clip")->capture_default_str();
  tok_encode->add_option("--patch", patch, "patch size")->capture_default_str();

  auto* pre_cmd = app.add_subcommand("pretrain", "staged pretraining");
  add_common(pre_cmd, pre_c);

  auto* ft_cmd = app.add_subcommand("finetune", "finetune one downstream task");
  add_common(ft_cmd, ft_c);
  ft_cmd->add_option("--task", task, "retrieval, mc_qa, open_qa or fib")->required();
  ft_cmd->add_option("--ckpt", ckpt, "pretrained checkpoint (random init when omitted)");

  auto* eval_cmd = app.add_subcommand("eval", "held-out metrics of a checkpoint");
  add_common(eval_cmd, eval_c);
  eval_cmd->add_option("--task", task, "retrieval, mc_qa, open_qa or fib")->required();
  eval_cmd->add_option("--ckpt", ckpt, "checkpoint")->required();
  eval_cmd->add_flag("--zero-shot", zero_shot, "score retrieval with the matching head");

  auto* abl_cmd = app.add_subcommand("ablate", "run one ablation axis across seeds");
  add_common(abl_cmd, abl_c);
  abl_cmd->add_option("--axis", axis, "video_encoding, mvm_variant or masking")->required();
  abl_cmd->add_option("--seeds", seeds, "root seeds")->delimiter(',');
  abl_cmd->add_flag("--no-pretrain", no_pretrain, "finetune every arm from random weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*synth) cmd_data_synth(data_c, format);
    else if (*tok_train) cmd_tokenizer_train(tok_c, tok_out);
    else if (*tok_encode) cmd_tokenizer_encode(tok_path, manifest, frames, patch);
    else if (*pre_cmd) cmd_pretrain(pre_c);
    else if (*ft_cmd) cmd_finetune(ft_c, task, ckpt);
    else if (*eval_cmd) cmd_eval(eval_c, task, ckpt, zero_shot);
    else if (*abl_cmd) cmd_ablate(abl_c, axis, seeds, no_pretrain);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const InputError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  }
  return 0;
}
