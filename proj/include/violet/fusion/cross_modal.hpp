// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "violet/core/transformer.hpp"

namespace violet::fusion {

struct CrossModalConfig {
  int d = 128;
  int depth = 4;
  int heads = 4;
  int l_max = 32;
  bool segment_embedding = true;  // learned video / text flag added to every row
};

/// Joint sequence layout: n_video video rows, one [CLS] row, n_text text rows.
struct JointFeatures {
  Var h;
  int n_video = 0;
  int n_text = 0;

  int length() const noexcept { return n_video + 1 + n_text; }
  int cls_row() const noexcept { return n_video; }
  int text_row(int i) const noexcept { return n_video + 1 + i; }
};

Var video_part(Tape& t, const JointFeatures& jf);
Var cls_part(Tape& t, const JointFeatures& jf);
Var text_part(Tape& t, const JointFeatures& jf);

/// Per-layer attention probabilities; layers[l].probs[head] is length x length.
struct AttentionMap {
  int n_video = 0;
  int n_text = 0;
  std::vector<AttentionCapture> layers;
};

class CrossModalTransformer {
 public:
  /// Registers "ct.*" parameters in `store`.
  CrossModalTransformer(ParameterStore& store, const CrossModalConfig& cfg, Rng& rng);

  const CrossModalConfig& config() const noexcept { return cfg_; }

  /// h = CT([v + pv, CLS, w + p_x]). `text_valid` flags real (non-[PAD]) text
  /// rows; empty means all valid. Invalid rows are never attended to. `w`
  /// may be an invalid Var for video-only input.
  JointFeatures fuse(Tape& t, Var v, Var pv, Var w, std::span<const char> text_valid = {},
                     AttentionMap* map = nullptr) const;

 private:
  CrossModalConfig cfg_;
  Parameter* cls_ = nullptr;
  Parameter* pos_text_ = nullptr;
  Parameter* segment_ = nullptr;
  std::vector<BlockParams> blocks_;
  Parameter* norm_g_ = nullptr;
  Parameter* norm_b_ = nullptr;
};

struct AttendedScores {
  std::vector<double> video;
  std::vector<double> text;
};

/// Importance of every video and text position: the head-averaged attention
/// paid to it by the `query` row of layer `layer`. Negative layer counts from
/// the end; query < 0 means the [CLS] row.
AttendedScores attended_scores(const AttentionMap& map, int layer = -1, int query = -1);

}  // namespace violet::fusion
