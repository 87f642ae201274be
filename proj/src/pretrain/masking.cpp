// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/pretrain/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "violet/core/errors.hpp"

namespace violet::pretrain {

MaskStrategy parse_strategy(std::string_view name) {
  if (name == "random") return MaskStrategy::Random;
  if (name == "bm") return MaskStrategy::Blockwise;
  if (name == "am") return MaskStrategy::Attended;
  if (name == "bm+am") return MaskStrategy::BlockwiseAttended;
  throw ConfigError("unknown masking strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::Random: return "random";
    case MaskStrategy::Blockwise: return "bm";
    case MaskStrategy::Attended: return "am";
    case MaskStrategy::BlockwiseAttended: return "bm+am";
  }
  return "?";
}

int MaskPlan::video_count() const {
  int n = 0;
  for (const auto& f : video_mask) n += static_cast<int>(f.size());
  return n;
}

std::vector<int> MaskPlan::video_flat(int sites) const {
  std::vector<int> out;
  for (std::size_t t = 0; t < video_mask.size(); ++t)
    for (int s : video_mask[t]) out.push_back(static_cast<int>(t) * sites + s);
  return out;
}

int mask_budget(double rate, int n) {
  if (n <= 0 || rate <= 0.0) return 0;
  const double x = rate * n;
  const int k = static_cast<int>(std::ceil(x - 1e-9 * std::max(1.0, x)));
  return std::clamp(k, 0, n);
}

std::vector<int> maskable_text_positions(const text::TextSequence& seq) {
  std::vector<int> out;
  for (int i = 0; i < seq.size(); ++i) {
    const bool valid = seq.valid.empty() || seq.valid[i] != 0;
    if (valid && !text::Vocabulary::is_special(seq.ids[i])) out.push_back(i);
  }
  return out;
}

std::vector<int> random_text_positions(const text::TextSequence& seq, double rate, Rng& rng) {
  std::vector<int> pool = maskable_text_positions(seq);
  const int k = mask_budget(rate, static_cast<int>(pool.size()));
  rng.shuffle(std::span<int>(pool));
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

text::TextSequence apply_text_mask(const text::TextSequence& seq, std::vector<int> positions, int vocab_size,
                                   Rng& rng, MaskPlan& plan, const TextMaskOptions& options) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  text::TextSequence out = seq;
  plan.text_mask.clear();
  plan.text_actions.clear();
  plan.text_written.clear();
  for (int pos : positions) {
    if (pos < 0 || pos >= seq.size()) throw InputError("text mask position out of range");
    if (text::Vocabulary::is_special(seq.ids[pos])) throw InputError("special tokens cannot be masked");
    const double u = rng.uniform();
    TextAction action = TextAction::Keep;
    if (u < options.p_mask) {
      action = TextAction::Mask;
      out.ids[pos] = text::kMask;
    } else if (u < options.p_mask + options.p_random) {
      action = TextAction::Random;
      out.ids[pos] = rng.uniform_int(text::kNumReserved, vocab_size - 1);
    }
    plan.text_mask.push_back(pos);
    plan.text_actions.push_back(action);
    plan.text_written.push_back(out.ids[pos]);
  }
  return out;
}

text::TextSequence mask_text(const text::TextSequence& seq, double rate, int vocab_size, Rng& rng,
                             MaskPlan& plan, const TextMaskOptions& options) {
  return apply_text_mask(seq, random_text_positions(seq, rate, rng), vocab_size, rng, plan, options);
}

namespace {

std::vector<std::vector<int>> split_flat(const std::vector<int>& flat, int T, int sites) {
  std::vector<std::vector<int>> out(T);
  for (int f : flat) out[f / sites].push_back(f % sites);
  for (auto& frame : out) std::sort(frame.begin(), frame.end());
  return out;
}

}  // namespace

std::vector<std::vector<int>> random_video_mask(int T, int H, int W, double rate, Rng& rng) {
  const int n = T * H * W;
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  rng.shuffle(std::span<int>(all));
  all.resize(mask_budget(rate, n));
  return split_flat(all, T, H * W);
}

std::vector<std::vector<int>> blockwise_mask(int T, int H, int W, double rate, Rng& rng,
                                             const BlockBounds& bounds, std::vector<Box>* boxes) {
  if (T < 1 || H < 1 || W < 1) throw InputError("blockwise_mask: empty grid");
  const int n = T * H * W;
  const int max_rows = std::clamp(bounds.max_rows, 1, H);
  const int max_cols = std::clamp(bounds.max_cols, 1, W);
  const int max_frames = bounds.max_frames > 0 ? std::min(bounds.max_frames, T) : T;
  std::vector<char> masked(n, 0);
  int count = 0;
  // Strictly more than rate * n; rate >= 1 can only mean "everything".
  const double target = std::min(rate * n, n - 0.5);
  // A block that would push the count past target + vmax - 1 is redrawn, so the
  // final fraction never exceeds rate + (vmax - 1) / n. A 1x1x1 block always
  // fits when vmax >= 2, which keeps the redraw loop finite.
  const int vmax = max_rows * max_cols * max_frames;
  const double cap = target + vmax - 1;
  auto fresh = [&](const Box& b) {
    int k = 0;
    for (int t = b.t; t < b.t + b.frames; ++t)
      for (int i = b.i; i < b.i + b.rows; ++i)
        for (int j = b.j; j < b.j + b.cols; ++j) k += masked[(t * H + i) * W + j] == 0;
    return k;
  };
  while (count <= target) {
    Box b;
    b.rows = rng.uniform_int(1, max_rows);
    b.cols = rng.uniform_int(1, max_cols);
    b.frames = rng.uniform_int(1, max_frames);
    b.t = rng.uniform_int(0, T - b.frames);
    b.i = rng.uniform_int(0, H - b.rows);
    b.j = rng.uniform_int(0, W - b.cols);
    if (vmax >= 2 && count + fresh(b) > cap) continue;
    for (int t = b.t; t < b.t + b.frames; ++t)
      for (int i = b.i; i < b.i + b.rows; ++i)
        for (int j = b.j; j < b.j + b.cols; ++j) {
          char& m = masked[(t * H + i) * W + j];
          count += m == 0;
          m = 1;
        }
    if (boxes != nullptr) boxes->push_back(b);
  }
  std::vector<int> flat;
  for (int f = 0; f < n; ++f)
    if (masked[f]) flat.push_back(f);
  return split_flat(flat, T, H * W);
}

std::vector<int> top_k_positions(std::span<const double> scores, double rate, std::span<const char> eligible) {
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(scores.size()); ++i)
    if (eligible.empty() || eligible[i]) pool.push_back(i);
  const int k = mask_budget(rate, static_cast<int>(pool.size()));
  std::stable_sort(pool.begin(), pool.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::vector<int>> attended_video_mask(std::span<const double> scores, int T, int sites, double rate) {
  if (static_cast<int>(scores.size()) != T * sites) throw InputError("attended mask: score count mismatch");
  return split_flat(top_k_positions(scores, rate), T, sites);
}

data::PatchGrid apply_video_mask(const data::PatchGrid& grid, const MaskPlan& plan) {
  if (static_cast<int>(plan.video_mask.size()) > grid.frames)
    throw InputError("video mask has more frames than the grid");
  data::PatchGrid out = grid;
  const int cols = grid.patches.cols();
  for (std::size_t t = 0; t < plan.video_mask.size(); ++t)
    for (int s : plan.video_mask[t]) {
      if (s < 0 || s >= grid.sites()) throw InputError("video mask index out of range");
      const int row = static_cast<int>(t) * grid.sites() + s;
      std::fill_n(out.patches.data() + static_cast<std::size_t>(row) * cols, cols, 0.0);
    }
  return out;
}

std::vector<std::vector<int>> union_masks(const std::vector<std::vector<int>>& a,
                                          const std::vector<std::vector<int>>& b) {
  std::vector<std::vector<int>> out(std::max(a.size(), b.size()));
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto& x = t < a.size() ? a[t] : std::vector<int>{};
    const auto& y = t < b.size() ? b[t] : std::vector<int>{};
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out[t]));
  }
  return out;
}

}  // namespace violet::pretrain
