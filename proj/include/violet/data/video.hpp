// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "violet/core/matrix.hpp"
#include "violet/core/random.hpp"

namespace violet::data {

/// One RGB frame, row-major height x width x 3, values in [0, 1].
struct Frame {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Frame() = default;
  Frame(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w * 3, fill) {}

  double& at(int y, int x, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  double at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  bool operator==(const Frame&) const = default;
};

struct VideoClip {
  std::string clip_id;
  std::vector<Frame> frames;
  std::string caption;
};

struct SampledClip {
  std::vector<Frame> frames;
  std::vector<int> source_indices;  // strictly increasing
};

/// Non-overlapping P x P patches of T frames. Row (t * rows + i) * cols + j
/// of `patches` holds patch (i, j) of frame t, flattened as (y, x, channel).
struct PatchGrid {
  int frames = 0;
  int rows = 0;
  int cols = 0;
  int patch = 0;
  Matrix patches;

  int sites() const noexcept { return rows * cols; }
  int count() const noexcept { return frames * rows * cols; }
  int index(int t, int i, int j) const noexcept { return (t * rows + i) * cols + j; }
};

/// Midpoint-of-equal-segments rule: index k is floor((2k + 1) F / (2T)).
/// With `jitter`, index k is drawn uniformly from its segment instead.
std::vector<int> sample_indices(int num_frames, int T, Rng* jitter = nullptr);

SampledClip sample_frames(const VideoClip& clip, int T, Rng* jitter = nullptr);

PatchGrid patchify(std::span<const Frame> frames, int patch);
inline PatchGrid patchify(const SampledClip& clip, int patch) { return patchify(clip.frames, patch); }

std::vector<Frame> reassemble(const PatchGrid& grid);

}  // namespace violet::data
