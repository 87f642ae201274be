// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/data/video.hpp"

#include <string>

#include "violet/core/errors.hpp"

namespace violet::data {

std::vector<int> sample_indices(int num_frames, int T, Rng* jitter) {
  if (T < 1 || T > num_frames) {
    throw InputError("cannot sample " + std::to_string(T) + " frames from a clip of " +
                     std::to_string(num_frames));
  }
  std::vector<int> out(T);
  for (int k = 0; k < T; ++k) {
    if (jitter != nullptr) {
      const int lo = static_cast<int>(static_cast<long>(k) * num_frames / T);
      const int hi = static_cast<int>(static_cast<long>(k + 1) * num_frames / T) - 1;
      out[k] = jitter->uniform_int(lo, hi);
    } else {
      out[k] = static_cast<int>(static_cast<long>(2 * k + 1) * num_frames / (2L * T));
    }
  }
  return out;
}

SampledClip sample_frames(const VideoClip& clip, int T, Rng* jitter) {
  SampledClip out;
  out.source_indices = sample_indices(static_cast<int>(clip.frames.size()), T, jitter);
  out.frames.reserve(T);
  for (int idx : out.source_indices) out.frames.push_back(clip.frames[idx]);
  return out;
}

PatchGrid patchify(std::span<const Frame> frames, int patch) {
  if (frames.empty()) throw InputError("patchify: no frames");
  if (patch < 1) throw InputError("patchify: patch size must be positive");
  const int h = frames[0].height, w = frames[0].width;
  if (h % patch != 0 || w % patch != 0) {
    throw InputError("patchify: frame " + std::to_string(h) + "x" + std::to_string(w) +
                     " not divisible by patch " + std::to_string(patch));
  }
  PatchGrid grid;
  grid.frames = static_cast<int>(frames.size());
  grid.rows = h / patch;
  grid.cols = w / patch;
  grid.patch = patch;
  const int dim = patch * patch * 3;
  grid.patches = Matrix(grid.count(), dim);
  for (int t = 0; t < grid.frames; ++t) {
    const Frame& f = frames[t];
    if (f.height != h || f.width != w) throw InputError("patchify: frames differ in size");
    for (int i = 0; i < grid.rows; ++i) {
      for (int j = 0; j < grid.cols; ++j) {
        double* dst = grid.patches.data() + static_cast<long>(grid.index(t, i, j)) * dim;
        for (int y = 0; y < patch; ++y) {
          for (int x = 0; x < patch; ++x) {
            for (int c = 0; c < 3; ++c) *dst++ = f.at(i * patch + y, j * patch + x, c);
          }
        }
      }
    }
  }
  return grid;
}

std::vector<Frame> reassemble(const PatchGrid& grid) {
  const int p = grid.patch, dim = p * p * 3;
  std::vector<Frame> out(grid.frames, Frame(grid.rows * p, grid.cols * p));
  for (int t = 0; t < grid.frames; ++t) {
    for (int i = 0; i < grid.rows; ++i) {
      for (int j = 0; j < grid.cols; ++j) {
        const double* src = grid.patches.data() + static_cast<long>(grid.index(t, i, j)) * dim;
        for (int y = 0; y < p; ++y) {
          for (int x = 0; x < p; ++x) {
            for (int c = 0; c < 3; ++c) out[t].at(i * p + y, j * p + x, c) = *src++;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace violet::data
