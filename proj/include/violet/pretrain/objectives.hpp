// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "violet/core/optimizer.hpp"
#include "violet/model/model.hpp"
#include "violet/pretrain/masking.hpp"
#include "violet/tokenizer/vq.hpp"

namespace violet::pretrain {

// Losses over head outputs. Each returns a 1x1 Var; an empty selection
// yields a constant zero.

/// Mean cross-entropy of `logits` rows against the original token ids.
Var mlm_loss(Tape& t, Var logits, std::span<const int> targets);
/// -log sigmoid(pos) - log(1 - sigmoid(neg)).
Var vtm_loss(Tape& t, Var logit_pos, Var logit_neg);

struct MvmOutput {
  Var loss;
  int correct = 0;
  int count = 0;
};
/// Per-frame mean cross-entropy summed over frames. Row r of `logits`
/// belongs to frame frame_of_row[r]; argmax ties go to the lower id.
MvmOutput mvm_loss(Tape& t, Var logits, std::span<const int> frame_of_row, std::span<const int> targets);
/// Per-frame mean smooth-L1 regression onto `targets` rows, summed over frames.
Var mfm_loss(Tape& t, Var pred, std::span<const int> frame_of_row, const Matrix& targets);

enum class VisualObjective { Mvm, Mfm, Off };
VisualObjective parse_visual_objective(std::string_view name);
std::string_view visual_objective_name(VisualObjective v);

struct PretrainConfig {
  MaskStrategy strategy = MaskStrategy::BlockwiseAttended;
  VisualObjective visual = VisualObjective::Mvm;
  double rate = 0.15;
  double lambda_mlm = 1.0;
  double lambda_vtm = 1.0;
  double lambda_visual = 1.0;
  bool use_text = true;  // false trains the visual objective on video alone
  BlockBounds blocks;
  TextMaskOptions text_actions;
  int attention_layer = -1;  // attended-masking statistic
};

/// One clip-caption pair. `tokens` and `features` describe the unmasked
/// patches: visual-token ids and tokenizer encoder outputs, one row per patch.
struct PretrainExample {
  data::PatchGrid grid;
  tokenizer::TokenGrid tokens;
  Matrix features;
  text::TextSequence text;
};

/// Builds an example, tokenizing before any masking happens.
PretrainExample make_example(const data::PatchGrid& grid, text::TextSequence text,
                             const tokenizer::VisualTokenizer* tokenizer);

/// Everything random about one example's loss, fixed ahead of evaluation.
struct ExamplePlan {
  MaskPlan plan;
  data::PatchGrid masked_grid;
  text::TextSequence masked_text;
  int negative = -1;  // batch index whose caption is the mismatched text
  text::TextSequence negative_text;
};

/// Head-averaged attention importance of every video patch and text token,
/// from an intact, gradient-free pass.
fusion::AttendedScores intact_attention_scores(const model::VioletModel& model, const PretrainExample& ex,
                                               int layer = -1);

ExamplePlan plan_example(const model::VioletModel& model, std::span<const PretrainExample> batch, int index,
                         const PretrainConfig& cfg, Rng& rng);

struct LossReport {
  double total = 0.0;
  double l_mlm = 0.0;
  double l_vtm = 0.0;
  double l_visual = 0.0;  // MVM or MFM, per the config
  int text_masked = 0;
  int video_masked = 0;
  int mvm_correct = 0;
  int mvm_count = 0;
  bool vtm_skipped = false;

  double mvm_accuracy() const { return mvm_count > 0 ? static_cast<double>(mvm_correct) / mvm_count : 0.0; }
};

/// Weighted loss of one planned example on tape `t`; adds its parts to `report`.
Var example_loss(Tape& t, const model::VioletModel& model, std::span<const PretrainExample> batch, int index,
                 const ExamplePlan& plan, const PretrainConfig& cfg, LossReport& report);

/// Plans and evaluates every example; with `backward`, accumulates the
/// gradient of the batch-mean loss into the parameters. Report fields are
/// batch means (counts are sums).
LossReport batch_loss(model::VioletModel& model, std::span<const PretrainExample> batch,
                      const PretrainConfig& cfg, Rng& rng, bool backward);

/// zero_grad, batch_loss with backward, one optimizer update.
LossReport pretrain_step(model::VioletModel& model, AdamW& optimizer, std::span<const PretrainExample> batch,
                         const PretrainConfig& cfg, Rng& rng);

}  // namespace violet::pretrain
