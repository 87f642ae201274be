// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "violet/core/random.hpp"
#include "violet/data/video.hpp"
#include "violet/text/vocab.hpp"

namespace violet::pretrain {

enum class MaskStrategy { Random, Blockwise, Attended, BlockwiseAttended };

MaskStrategy parse_strategy(std::string_view name);
std::string_view strategy_name(MaskStrategy s);

enum class TextAction : unsigned char { Mask, Random, Keep };

/// One masked spatio-temporal box: frames [t, t + frames), rows [i, i + rows),
/// columns [j, j + cols).
struct Box {
  int t = 0;
  int i = 0;
  int j = 0;
  int frames = 1;
  int rows = 1;
  int cols = 1;
  int volume() const noexcept { return frames * rows * cols; }
};

struct MaskPlan {
  /// Masked text positions, ascending, with the action taken and the id that
  /// was written there.
  std::vector<int> text_mask;
  std::vector<TextAction> text_actions;
  std::vector<int> text_written;
  /// video_mask[t] holds the masked sites i * W + j of frame t, ascending.
  std::vector<std::vector<int>> video_mask;
  /// Boxes sampled by blockwise masking, in sampling order.
  std::vector<Box> boxes;

  int video_count() const;
  /// Flat patch indices t * sites + s, ascending.
  std::vector<int> video_flat(int sites) const;
};

/// ceil(rate * n), robust to rounding noise in rate * n.
int mask_budget(double rate, int n);

struct TextMaskOptions {
  double p_mask = 0.8;
  double p_random = 0.1;  // the remainder keeps the original token
};

/// Positions eligible for text masking: valid and not a reserved token.
std::vector<int> maskable_text_positions(const text::TextSequence& seq);

/// Uniform random subset of exactly mask_budget(rate, L_eff) maskable positions.
std::vector<int> random_text_positions(const text::TextSequence& seq, double rate, Rng& rng);

/// Applies MASK / random / keep actions at `positions` and records them in
/// `plan`. Random replacements are drawn from the non-reserved ids.
text::TextSequence apply_text_mask(const text::TextSequence& seq, std::vector<int> positions, int vocab_size,
                                   Rng& rng, MaskPlan& plan, const TextMaskOptions& options = {});

/// random_text_positions followed by apply_text_mask.
text::TextSequence mask_text(const text::TextSequence& seq, double rate, int vocab_size, Rng& rng,
                             MaskPlan& plan, const TextMaskOptions& options = {});

/// Exactly mask_budget(rate, T*H*W) patches chosen uniformly.
std::vector<std::vector<int>> random_video_mask(int T, int H, int W, double rate, Rng& rng);

struct BlockBounds {
  int max_rows = 4;
  int max_cols = 4;
  int max_frames = 0;  // 0 means T
};

/// Samples boxes until strictly more than rate * T*H*W patches are masked.
/// Boxes that would overshoot by a full block volume or more are redrawn.
/// Appends the kept boxes to `boxes` when given.
std::vector<std::vector<int>> blockwise_mask(int T, int H, int W, double rate, Rng& rng,
                                             const BlockBounds& bounds = {}, std::vector<Box>* boxes = nullptr);

/// Indices of the mask_budget(rate, n) highest scores among `eligible`
/// (all positions when empty), ties to the lower index, returned ascending.
std::vector<int> top_k_positions(std::span<const double> scores, double rate, std::span<const char> eligible = {});

/// Attended masking over video patches: top-k of the flat scores (T*H*W).
std::vector<std::vector<int>> attended_video_mask(std::span<const double> scores, int T, int sites, double rate);

/// Zeros the pixels of every masked patch.
data::PatchGrid apply_video_mask(const data::PatchGrid& grid, const MaskPlan& plan);

/// Union of two per-frame masks.
std::vector<std::vector<int>> union_masks(const std::vector<std::vector<int>>& a,
                                          const std::vector<std::vector<int>>& b);

}  // namespace violet::pretrain
