// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "violet/harness/runner.hpp"

namespace violet::harness {

enum class AblationAxis { VideoEncoding, MvmVariant, Masking };
AblationAxis parse_axis(std::string_view name);
std::string_view axis_name(AblationAxis a);

/// Arms in table order: {mean, concat, vt}, {off, mfm, mvm}, {random, bm, am, bm+am}.
std::vector<std::string> ablation_arms(AblationAxis axis);
/// `base` with the axis field set to `arm`.
ExperimentConfig apply_arm(ExperimentConfig base, AblationAxis axis, std::string_view arm);

struct AblationSettings {
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::vector<downstream::Task> tasks{downstream::Task::Retrieval, downstream::Task::McQa};
  bool pretrain = true;  // false finetunes every arm from random weights
  std::vector<std::string> arms;  // empty: every arm of the axis
};

/// One (arm, seed) run. Metric keys read "<task>/<metric>" for held-out
/// scores and "pretrain/mvm_accuracy" when the run pretrains with MVM.
struct ArmRun {
  std::string arm;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
};

struct AblationTable {
  AblationAxis axis = AblationAxis::VideoEncoding;
  std::vector<std::string> arms;
  std::vector<ArmRun> runs;

  /// Mean over seeds; NaN when no run of `arm` reports `metric`.
  double mean(std::string_view arm, std::string_view metric) const;
  std::vector<std::string> metrics() const;
  std::string to_markdown() const;
};

/// Runs every arm under every seed with identical budgets. The tokenizer is
/// shared by all arms and only needed when an arm pretrains with a visual objective.
AblationTable run_ablation(const ExperimentConfig& base, AblationAxis axis, const AblationSettings& settings,
                           const tokenizer::VisualTokenizer* tok);

struct OrdinalCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The directional claims for the axis, evaluated on seed means.
std::vector<OrdinalCheck> ordinal_checks(const AblationTable& table, int mc_options = 2);

/// Spearman rank correlation with average ranks for ties; NaN when either
/// side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace violet::harness
