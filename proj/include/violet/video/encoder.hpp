// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "violet/core/transformer.hpp"
#include "violet/data/video.hpp"

namespace violet::video {

enum class Variant { VT, Mean, Concat };

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v);

struct Dims3 {
  int t = 1;
  int h = 1;
  int w = 1;
  bool operator==(const Dims3&) const = default;
};

/// Cyclic shift by `shift` followed by a partition into window-sized boxes.
/// windows[k] lists, in window-local raster order, the flat index
/// (t * H + i) * W + j of the original position held at each slot, or -1 for
/// a padding slot. regions[k] labels the slots so that positions wrapped
/// around by the shift never attend to each other.
struct WindowPartition {
  Dims3 dims;
  Dims3 padded;
  Dims3 window;
  Dims3 shift;
  std::vector<std::vector<int>> windows;
  std::vector<std::vector<int>> regions;
};

/// Throws ConfigError when a shift offset is not smaller than its window, or
/// when padding is needed but disallowed.
WindowPartition window_partition_3d(Dims3 dims, Dims3 window, Dims3 shift, bool allow_padding = true);

/// Stacks the rows of x (T*H*W x d) window by window; padding slots are zero.
Matrix partition_rows(const Matrix& x, const WindowPartition& part);
/// Inverse of partition_rows.
Matrix merge_rows(const Matrix& stacked, const WindowPartition& part);

/// Attention groups for the partition with padding slots dropped.
AttentionLayout window_layout(const WindowPartition& part);

struct EncoderConfig {
  int d = 128;
  int depth = 4;
  int heads = 4;
  Dims3 window{2, 2, 2};
  bool shift = true;  // odd blocks use a half-window shift
  bool pad_windows = true;
  Variant variant = Variant::VT;
  int patch_dim = 8 * 8 * 3;
  int grid_h = 8;
  int grid_w = 8;
  int t_max = 4;
};

/// Window and shift actually used by block `index` for a T-frame input.
/// Mean and Concat use single-frame windows so frames never mix.
void block_window(const EncoderConfig& cfg, int frames, int index, Dims3& window, Dims3& shift);

class VideoEncoder {
 public:
  /// Registers "video.*" parameters in `store`.
  VideoEncoder(ParameterStore& store, const EncoderConfig& cfg, Rng& rng);

  const EncoderConfig& config() const noexcept { return cfg_; }
  Parameter& spatial() const { return *pos_spatial_; }
  Parameter& temporal() const { return *pos_temporal_; }

  /// u = LinearProj(flatten(patch)) for every patch row.
  Var embed_patches(Tape& t, const data::PatchGrid& grid) const;
  /// u[t,i,j] + p_s[i,j] + p_t[t] (VT). Mean and Concat add p_s only, which
  /// keeps their per-frame encodings independent of frame position.
  Var add_positions(Tape& t, Var u, int frames) const;
  /// p^v = p_s + p_t broadcast over frames; reused by the cross-modal input.
  Var positions(Tape& t, int frames) const;
  Var encode(Tape& t, Var u_pos, int frames) const;
  Var forward(Tape& t, const data::PatchGrid& grid) const;

 private:
  void check_frames(int frames) const;

  EncoderConfig cfg_;
  LinearParams proj_;
  Parameter* pos_spatial_ = nullptr;
  Parameter* pos_temporal_ = nullptr;
  std::vector<BlockParams> blocks_;
  Parameter* norm_g_ = nullptr;
  Parameter* norm_b_ = nullptr;
};

}  // namespace violet::video
