// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/harness/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "violet/core/errors.hpp"

namespace violet::harness {

using downstream::Task;

AblationAxis parse_axis(std::string_view name) {
  if (name == "video_encoding") return AblationAxis::VideoEncoding;
  if (name == "mvm_variant") return AblationAxis::MvmVariant;
  if (name == "masking") return AblationAxis::Masking;
  throw ConfigError("unknown ablation axis '" + std::string(name) + "'");
}

std::string_view axis_name(AblationAxis a) {
  switch (a) {
    case AblationAxis::VideoEncoding: return "video_encoding";
    case AblationAxis::MvmVariant: return "mvm_variant";
    case AblationAxis::Masking: return "masking";
  }
  return "?";
}

std::vector<std::string> ablation_arms(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::VideoEncoding: return {"mean", "concat", "vt"};
    case AblationAxis::MvmVariant: return {"off", "mfm", "mvm"};
    case AblationAxis::Masking: return {"random", "bm", "am", "bm+am"};
  }
  return {};
}

ExperimentConfig apply_arm(ExperimentConfig base, AblationAxis axis, std::string_view arm) {
  const auto arms = ablation_arms(axis);
  if (std::find(arms.begin(), arms.end(), arm) == arms.end())
    throw ConfigError(fmt::format("'{}' is not an arm of {}", arm, axis_name(axis)));
  switch (axis) {
    case AblationAxis::VideoEncoding: set_value(base, "encoder.variant", arm); break;
    case AblationAxis::MvmVariant: set_value(base, "mvm.variant", arm); break;
    case AblationAxis::Masking: set_value(base, "pretrain.strategy", arm); break;
  }
  return base;
}

double AblationTable::mean(std::string_view arm, std::string_view metric) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : runs) {
    if (r.arm != arm) continue;
    const auto it = r.metrics.find(std::string(metric));
    if (it == r.metrics.end()) continue;
    sum += it->second;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / n;
}

std::vector<std::string> AblationTable::metrics() const {
  std::set<std::string> keys;
  for (const auto& r : runs)
    for (const auto& [k, _] : r.metrics) keys.insert(k);
  return {keys.begin(), keys.end()};
}

std::string AblationTable::to_markdown() const {
  const auto keys = metrics();
  std::string out = "| arm |";
  for (const auto& k : keys) out += " " + k + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < keys.size(); ++i) out += "---|";
  out += '\n';
  for (const auto& arm : arms) {
    out += "| " + arm + " |";
    for (const auto& k : keys) {
      const double v = mean(arm, k);
      out += std::isnan(v) ? " - |" : fmt::format(" {:.4f} |", v);
    }
    out += '\n';
  }
  return out;
}

AblationTable run_ablation(const ExperimentConfig& base, AblationAxis axis, const AblationSettings& settings,
                           const tokenizer::VisualTokenizer* tok) {
  if (settings.seeds.empty()) throw ConfigError("ablation needs at least one seed");
  AblationTable table;
  table.axis = axis;
  table.arms = settings.arms.empty() ? ablation_arms(axis) : settings.arms;
  for (const auto& arm : table.arms) {
    for (const std::uint64_t seed : settings.seeds) {
      ExperimentConfig cfg = apply_arm(base, axis, arm);
      cfg.seed = seed;
      ArmRun run{arm, seed, {}};
      Checkpoint ckpt;
      const Checkpoint* start = nullptr;
      if (settings.pretrain) {
        const auto pre = run_pretrain(cfg, tok);
        ckpt = pre.checkpoint;
        start = &ckpt;
        if (cfg.pretrain.visual == pretrain::VisualObjective::Mvm && tok != nullptr) {
          Workspace ws = build_workspace(cfg);
          auto m = model_from_checkpoint(cfg, ckpt);
          Rng noise(0);
          const auto held = pretrain_examples(cfg, ws.held_out, ws.vocab, tok, 0.0, noise);
          run.metrics["pretrain/mvm_accuracy"] = mvm_accuracy(*m, held, cfg, derive_seed(seed, "mvm-probe"));
        }
      }
      for (const Task task : settings.tasks) {
        const auto ft = run_finetune(cfg, task, start);
        for (const auto& rec : ft.held_out_metrics)
          run.metrics[fmt::format("{}/{}", rec.task, rec.metric)] = rec.value;
      }
      std::string summary;
      for (const auto& [k, v] : run.metrics) summary += fmt::format(" {}={:.3f}", k, v);
      spdlog::info("{} arm {} seed {}:{}", axis_name(axis), arm, seed, summary);
      table.runs.push_back(std::move(run));
    }
  }
  return table;
}

namespace {

OrdinalCheck at_least(const AblationTable& t, const std::string& hi, const std::string& lo, const std::string& metric,
                      double margin = 0.0) {
  const double a = t.mean(hi, metric), b = t.mean(lo, metric);
  OrdinalCheck c;
  c.name = margin > 0.0 ? fmt::format("{} - {} >= {:.2f} on {}", hi, lo, margin, metric)
                        : fmt::format("{} >= {} on {}", hi, lo, metric);
  c.pass = !std::isnan(a) && !std::isnan(b) && a - b >= margin - 1e-12;
  c.detail = fmt::format("{}={:.4f} {}={:.4f}", hi, a, lo, b);
  return c;
}

}  // namespace

std::vector<OrdinalCheck> ordinal_checks(const AblationTable& t, int mc_options) {
  std::vector<OrdinalCheck> out;
  switch (t.axis) {
    case AblationAxis::VideoEncoding: {
      for (const std::string metric : {"retrieval/R@1", "mc_qa/accuracy"}) {
        out.push_back(at_least(t, "vt", "concat", metric));
        out.push_back(at_least(t, "concat", "mean", metric));
        out.push_back(at_least(t, "vt", "mean", metric, 0.05));
      }
      const double chance = 1.0 / mc_options;
      const double mean_mc = t.mean("mean", "mc_qa/accuracy"), vt_mc = t.mean("vt", "mc_qa/accuracy");
      out.push_back({"mean at chance on the direction probe", std::abs(mean_mc - chance) <= 0.05 + 1e-12,
                     fmt::format("mean={:.4f} chance={:.4f}", mean_mc, chance)});
      out.push_back({"vt exceeds chance by 0.20 on the direction probe", vt_mc - chance >= 0.20 - 1e-12,
                     fmt::format("vt={:.4f} chance={:.4f}", vt_mc, chance)});
      break;
    }
    case AblationAxis::MvmVariant: out.push_back(at_least(t, "mvm", "off", "retrieval/R@5")); break;
    case AblationAxis::Masking: out.push_back(at_least(t, "bm+am", "random", "retrieval/R@5")); break;
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("spearman needs two equal-length series of length >= 2");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace violet::harness
