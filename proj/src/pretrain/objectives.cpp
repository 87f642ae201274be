// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/pretrain/objectives.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <string>

#include "violet/core/errors.hpp"

namespace violet::pretrain {

namespace {

Var zero(Tape& t) { return t.constant(Matrix(1, 1, 0.0)); }

// Weight 1 / |rows of the same frame| for every row.
std::vector<double> per_frame_weights(std::span<const int> frame_of_row) {
  int frames = 0;
  for (int f : frame_of_row) frames = std::max(frames, f + 1);
  std::vector<int> counts(frames, 0);
  for (int f : frame_of_row) ++counts[f];
  std::vector<double> w;
  w.reserve(frame_of_row.size());
  for (int f : frame_of_row) w.push_back(1.0 / counts[f]);
  return w;
}

}  // namespace

Var mlm_loss(Tape& t, Var logits, std::span<const int> targets) {
  if (targets.empty()) return zero(t);
  const std::vector<double> w(targets.size(), 1.0 / static_cast<double>(targets.size()));
  return ops::cross_entropy(t, logits, targets, w);
}

Var vtm_loss(Tape& t, Var logit_pos, Var logit_neg) {
  return ops::add(t, ops::bce_with_logits(t, logit_pos, 1.0), ops::bce_with_logits(t, logit_neg, 0.0));
}

MvmOutput mvm_loss(Tape& t, Var logits, std::span<const int> frame_of_row, std::span<const int> targets) {
  MvmOutput out;
  if (targets.empty()) {
    out.loss = zero(t);
    return out;
  }
  if (frame_of_row.size() != targets.size()) throw InputError("mvm_loss: frame labels do not match targets");
  out.loss = ops::cross_entropy(t, logits, targets, per_frame_weights(frame_of_row));
  const Matrix& z = t.value(logits);
  for (int r = 0; r < z.rows(); ++r) {
    int best = 0;
    for (int c = 1; c < z.cols(); ++c)
      if (z(r, c) > z(r, best)) best = c;
    out.correct += best == targets[r];
  }
  out.count = static_cast<int>(targets.size());
  return out;
}

Var mfm_loss(Tape& t, Var pred, std::span<const int> frame_of_row, const Matrix& targets) {
  if (frame_of_row.empty()) return zero(t);
  return ops::smooth_l1(t, pred, targets, per_frame_weights(frame_of_row));
}

VisualObjective parse_visual_objective(std::string_view name) {
  if (name == "mvm") return VisualObjective::Mvm;
  if (name == "mfm") return VisualObjective::Mfm;
  if (name == "off") return VisualObjective::Off;
  throw ConfigError("unknown visual objective '" + std::string(name) + "'");
}

std::string_view visual_objective_name(VisualObjective v) {
  switch (v) {
    case VisualObjective::Mvm: return "mvm";
    case VisualObjective::Mfm: return "mfm";
    case VisualObjective::Off: return "off";
  }
  return "?";
}

PretrainExample make_example(const data::PatchGrid& grid, text::TextSequence text,
                             const tokenizer::VisualTokenizer* tokenizer) {
  PretrainExample ex;
  ex.grid = grid;
  ex.text = std::move(text);
  if (tokenizer != nullptr) {
    ex.tokens = tokenizer->tokenize(grid);
    ex.features = tokenizer->encode(grid.patches);
  }
  return ex;
}

fusion::AttendedScores intact_attention_scores(const model::VioletModel& model, const PretrainExample& ex,
                                               int layer) {
  Tape t(false);
  fusion::AttentionMap map;
  const auto enc = model.encode_video(t, ex.grid);
  model.fuse(t, enc, ex.text.ids, ex.text.valid, &map);
  return fusion::attended_scores(map, layer);
}

ExamplePlan plan_example(const model::VioletModel& model, std::span<const PretrainExample> batch, int index,
                         const PretrainConfig& cfg, Rng& rng) {
  const PretrainExample& ex = batch[index];
  const int T = ex.grid.frames, H = ex.grid.rows, W = ex.grid.cols;
  const int vocab = model.config().vocab_size;
  ExamplePlan out;
  const text::TextSequence no_text;
  const text::TextSequence& caption = cfg.use_text ? ex.text : no_text;

  std::vector<int> text_positions;
  fusion::AttendedScores scores;
  const bool attended =
      cfg.strategy == MaskStrategy::Attended || cfg.strategy == MaskStrategy::BlockwiseAttended;
  if (attended) {
    PretrainExample probe;
    probe.grid = ex.grid;
    probe.text = caption;
    scores = intact_attention_scores(model, probe, cfg.attention_layer);
  }
  switch (cfg.strategy) {
    case MaskStrategy::Random:
      out.plan.video_mask = random_video_mask(T, H, W, cfg.rate, rng);
      text_positions = random_text_positions(caption, cfg.rate, rng);
      break;
    case MaskStrategy::Blockwise:
      out.plan.video_mask = blockwise_mask(T, H, W, cfg.rate, rng, cfg.blocks, &out.plan.boxes);
      text_positions = random_text_positions(caption, cfg.rate, rng);
      break;
    case MaskStrategy::Attended:
    case MaskStrategy::BlockwiseAttended: {
      out.plan.video_mask = attended_video_mask(scores.video, T, H * W, cfg.rate);
      std::vector<char> eligible(caption.size(), 0);
      for (int p : maskable_text_positions(caption)) eligible[p] = 1;
      text_positions = top_k_positions(scores.text, cfg.rate, eligible);
      if (cfg.strategy == MaskStrategy::BlockwiseAttended) {
        const auto bm = blockwise_mask(T, H, W, cfg.rate, rng, cfg.blocks, &out.plan.boxes);
        out.plan.video_mask = union_masks(bm, out.plan.video_mask);
        // Top up to the floor with random picks (a no-op unless ties or
        // eligibility cut the attended selection short).
        const int floor = mask_budget(cfg.rate, static_cast<int>(maskable_text_positions(caption).size()));
        std::vector<int> rest;
        for (int p : maskable_text_positions(caption))
          if (!std::binary_search(text_positions.begin(), text_positions.end(), p)) rest.push_back(p);
        rng.shuffle(std::span<int>(rest));
        for (int i = 0; static_cast<int>(text_positions.size()) < floor; ++i) text_positions.push_back(rest[i]);
      }
      break;
    }
  }
  out.masked_text = apply_text_mask(caption, std::move(text_positions), vocab, rng, out.plan, cfg.text_actions);
  out.masked_grid = apply_video_mask(ex.grid, out.plan);

  const int B = static_cast<int>(batch.size());
  if (cfg.use_text && cfg.lambda_vtm > 0.0 && B >= 2) {
    const int r = rng.uniform_int(0, B - 2);
    out.negative = r >= index ? r + 1 : r;
    // The mismatched caption is masked too, so masking alone never marks a positive.
    MaskPlan scratch;
    out.negative_text = mask_text(batch[out.negative].text, cfg.rate, vocab, rng, scratch, cfg.text_actions);
  }
  return out;
}

Var example_loss(Tape& t, const model::VioletModel& model, std::span<const PretrainExample> batch, int index,
                 const ExamplePlan& plan, const PretrainConfig& cfg, LossReport& report) {
  using model::Head;
  const PretrainExample& ex = batch[index];
  const auto enc = model.encode_video(t, plan.masked_grid);
  const auto jf = model.fuse(t, enc, plan.masked_text.ids, plan.masked_text.valid);

  std::vector<Var> parts;
  std::vector<double> weights;

  Var mlm = zero(t);
  if (!plan.plan.text_mask.empty()) {
    std::vector<int> rows, targets;
    for (int p : plan.plan.text_mask) {
      rows.push_back(jf.text_row(p));
      targets.push_back(ex.text.ids[p]);
    }
    mlm = mlm_loss(t, model.apply_head(t, ops::gather_rows(t, jf.h, rows), Head::Mlm), targets);
  }
  parts.push_back(mlm);
  weights.push_back(cfg.lambda_mlm);
  report.l_mlm += t.value(mlm)(0, 0);
  report.text_masked += static_cast<int>(plan.plan.text_mask.size());

  if (plan.negative >= 0) {
    const Var pos = model.apply_head(t, fusion::cls_part(t, jf), Head::Vtm);
    const auto neg_jf = model.fuse(t, enc, plan.negative_text.ids, plan.negative_text.valid);
    const Var neg = model.apply_head(t, fusion::cls_part(t, neg_jf), Head::Vtm);
    const Var vtm = vtm_loss(t, pos, neg);
    parts.push_back(vtm);
    weights.push_back(cfg.lambda_vtm);
    report.l_vtm += t.value(vtm)(0, 0);
  } else if (cfg.use_text && cfg.lambda_vtm > 0.0) {
    report.vtm_skipped = true;
  }

  const int sites = ex.grid.sites();
  const std::vector<int> flat = plan.plan.video_flat(sites);
  report.video_masked += static_cast<int>(flat.size());
  if (cfg.visual != VisualObjective::Off && !flat.empty()) {
    std::vector<int> frame_of_row;
    for (int f : flat) frame_of_row.push_back(f / sites);
    const Var hv = ops::gather_rows(t, jf.h, flat);
    Var visual;
    if (cfg.visual == VisualObjective::Mvm) {
      if (static_cast<int>(ex.tokens.ids.size()) != ex.grid.count())
        throw ConfigError("visual-token grid does not match the patch grid");
      std::vector<int> targets;
      for (int f : flat) targets.push_back(ex.tokens.ids[f]);
      const auto mvm = mvm_loss(t, model.apply_head(t, hv, Head::Mvm), frame_of_row, targets);
      visual = mvm.loss;
      report.mvm_correct += mvm.correct;
      report.mvm_count += mvm.count;
    } else {
      if (ex.features.rows() != ex.grid.count() || ex.features.cols() != model.config().feature_dim)
        throw ConfigError("feature targets do not match the patch grid");
      Matrix targets(static_cast<int>(flat.size()), ex.features.cols());
      for (std::size_t r = 0; r < flat.size(); ++r)
        for (int c = 0; c < targets.cols(); ++c) targets(static_cast<int>(r), c) = ex.features(flat[r], c);
      visual = mfm_loss(t, model.apply_head(t, hv, Head::Mfm), frame_of_row, targets);
    }
    parts.push_back(visual);
    weights.push_back(cfg.lambda_visual);
    report.l_visual += t.value(visual)(0, 0);
  }

  const Var total = ops::weighted_sum(t, parts, weights);
  report.total += t.value(total)(0, 0);
  return total;
}

LossReport batch_loss(model::VioletModel& model, std::span<const PretrainExample> batch,
                      const PretrainConfig& cfg, Rng& rng, bool backward) {
  if (batch.empty()) throw InputError("empty pretraining batch");
  LossReport report;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (int i = 0; i < static_cast<int>(batch.size()); ++i) {
    const ExamplePlan plan = plan_example(model, batch, i, cfg, rng);
    Tape tape(backward);
    const Var loss = example_loss(tape, model, batch, i, plan, cfg, report);
    if (backward) tape.backward(loss, inv);
  }
  report.total *= inv;
  report.l_mlm *= inv;
  report.l_vtm *= inv;
  report.l_visual *= inv;
  if (report.vtm_skipped) spdlog::warn("batch of one has no mismatched caption; matching loss skipped");
  return report;
}

LossReport pretrain_step(model::VioletModel& model, AdamW& optimizer, std::span<const PretrainExample> batch,
                         const PretrainConfig& cfg, Rng& rng) {
  model.params().zero_grad();
  const LossReport report = batch_loss(model, batch, cfg, rng, true);
  optimizer.step(model.params());
  return report;
}

}  // namespace violet::pretrain
