// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/video/encoder.hpp"

#include <algorithm>
#include <string>

#include "violet/core/errors.hpp"

namespace violet::video {

Variant parse_variant(std::string_view name) {
  if (name == "vt" || name == "VT") return Variant::VT;
  if (name == "mean" || name == "Mean") return Variant::Mean;
  if (name == "concat" || name == "Concat") return Variant::Concat;
  throw ConfigError("unknown video encoder variant '" + std::string(name) + "'");
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::VT: return "vt";
    case Variant::Mean: return "mean";
    case Variant::Concat: return "concat";
  }
  return "?";
}

namespace {

int round_up(int n, int m) { return (n + m - 1) / m * m; }

// Region label along one axis of the shifted, padded extent.
int axis_region(int p, int extent, int window, int shift) {
  if (shift == 0) return 0;
  if (p < extent - window) return 0;
  if (p < extent - shift) return 1;
  return 2;
}

}  // namespace

WindowPartition window_partition_3d(Dims3 dims, Dims3 window, Dims3 shift, bool allow_padding) {
  if (dims.t < 1 || dims.h < 1 || dims.w < 1) throw ConfigError("window partition: empty grid");
  if (window.t < 1 || window.h < 1 || window.w < 1) throw ConfigError("window partition: empty window");
  if (shift.t < 0 || shift.h < 0 || shift.w < 0 || shift.t >= window.t || shift.h >= window.h ||
      shift.w >= window.w)
    throw ConfigError("window partition: shift must lie in [0, window)");
  WindowPartition part;
  part.dims = dims;
  part.window = window;
  part.shift = shift;
  part.padded = {round_up(dims.t, window.t), round_up(dims.h, window.h), round_up(dims.w, window.w)};
  if (!allow_padding && !(part.padded == dims))
    throw ConfigError("window partition: window does not tile the grid and padding is disabled");

  const Dims3 P = part.padded;
  const int nt = P.t / window.t, nh = P.h / window.h, nw = P.w / window.w;
  const int slots = window.t * window.h * window.w;
  part.windows.reserve(static_cast<std::size_t>(nt) * nh * nw);
  for (int bt = 0; bt < nt; ++bt)
    for (int bh = 0; bh < nh; ++bh)
      for (int bw = 0; bw < nw; ++bw) {
        std::vector<int> win;
        std::vector<int> reg;
        win.reserve(slots);
        reg.reserve(slots);
        for (int a = 0; a < window.t; ++a)
          for (int b = 0; b < window.h; ++b)
            for (int c = 0; c < window.w; ++c) {
              const int st = bt * window.t + a, sh = bh * window.h + b, sw = bw * window.w + c;
              // Shifted slot s holds the padded position (s + shift) mod P.
              const int ot = (st + shift.t) % P.t;
              const int oh = (sh + shift.h) % P.h;
              const int ow = (sw + shift.w) % P.w;
              const bool inside = ot < dims.t && oh < dims.h && ow < dims.w;
              win.push_back(inside ? (ot * dims.h + oh) * dims.w + ow : -1);
              reg.push_back(axis_region(st, P.t, window.t, shift.t) * 9 +
                            axis_region(sh, P.h, window.h, shift.h) * 3 +
                            axis_region(sw, P.w, window.w, shift.w));
            }
        part.windows.push_back(std::move(win));
        part.regions.push_back(std::move(reg));
      }
  return part;
}

Matrix partition_rows(const Matrix& x, const WindowPartition& part) {
  const int n = part.dims.t * part.dims.h * part.dims.w;
  if (x.rows() != n) throw InputError("partition_rows: row count does not match the grid");
  const int slots = part.window.t * part.window.h * part.window.w;
  Matrix out(static_cast<int>(part.windows.size()) * slots, x.cols());
  for (std::size_t k = 0; k < part.windows.size(); ++k)
    for (int s = 0; s < slots; ++s) {
      const int src = part.windows[k][s];
      if (src < 0) continue;
      std::copy_n(x.data() + static_cast<std::size_t>(src) * x.cols(), x.cols(),
                  out.data() + (k * slots + s) * static_cast<std::size_t>(x.cols()));
    }
  return out;
}

Matrix merge_rows(const Matrix& stacked, const WindowPartition& part) {
  const int n = part.dims.t * part.dims.h * part.dims.w;
  const int slots = part.window.t * part.window.h * part.window.w;
  if (stacked.rows() != static_cast<int>(part.windows.size()) * slots)
    throw InputError("merge_rows: row count does not match the partition");
  Matrix out(n, stacked.cols());
  for (std::size_t k = 0; k < part.windows.size(); ++k)
    for (int s = 0; s < slots; ++s) {
      const int dst = part.windows[k][s];
      if (dst < 0) continue;
      std::copy_n(stacked.data() + (k * slots + s) * static_cast<std::size_t>(stacked.cols()),
                  stacked.cols(), out.data() + static_cast<std::size_t>(dst) * out.cols());
    }
  return out;
}

AttentionLayout window_layout(const WindowPartition& part) {
  AttentionLayout layout;
  layout.sequence_length = part.dims.t * part.dims.h * part.dims.w;
  const bool shifted = part.shift.t > 0 || part.shift.h > 0 || part.shift.w > 0;
  for (std::size_t k = 0; k < part.windows.size(); ++k) {
    AttentionGroup g;
    for (std::size_t s = 0; s < part.windows[k].size(); ++s) {
      if (part.windows[k][s] < 0) continue;
      g.rows.push_back(part.windows[k][s]);
      if (shifted) g.region.push_back(part.regions[k][s]);
    }
    if (!g.rows.empty()) layout.groups.push_back(std::move(g));
  }
  return layout;
}

void block_window(const EncoderConfig& cfg, int frames, int index, Dims3& window, Dims3& shift) {
  const Dims3 dims{frames, cfg.grid_h, cfg.grid_w};
  window = cfg.window;
  if (cfg.variant != Variant::VT) window.t = 1;
  window.t = std::min(window.t, dims.t);
  if (!cfg.pad_windows && (window.h > dims.h || window.w > dims.w))
    throw ConfigError("video window is larger than the patch grid and padding is disabled");
  window.h = std::min(window.h, dims.h);
  window.w = std::min(window.w, dims.w);
  shift = {0, 0, 0};
  if (cfg.shift && index % 2 == 1) {
    // An axis the window already covers gains nothing from shifting.
    shift.t = window.t < dims.t ? window.t / 2 : 0;
    shift.h = window.h < dims.h ? window.h / 2 : 0;
    shift.w = window.w < dims.w ? window.w / 2 : 0;
  }
}

VideoEncoder::VideoEncoder(ParameterStore& store, const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
  if (cfg.d < 1 || cfg.heads < 1 || cfg.d % cfg.heads != 0)
    throw ConfigError("video encoder: d must be a positive multiple of heads");
  if (cfg.depth < 0) throw ConfigError("video encoder: negative depth");
  if (cfg.grid_h < 1 || cfg.grid_w < 1 || cfg.t_max < 1 || cfg.patch_dim < 1)
    throw ConfigError("video encoder: empty patch grid");
  if (cfg.window.t < 1 || cfg.window.h < 1 || cfg.window.w < 1)
    throw ConfigError("video encoder: window sizes must be positive");
  proj_ = add_linear(store, "video.patch_proj", cfg.patch_dim, cfg.d, rng);
  pos_spatial_ = &store.add("video.pos_spatial", cfg.grid_h * cfg.grid_w, cfg.d, Init::Normal, rng,
                            kInitStd, false);
  pos_temporal_ = &store.add("video.pos_temporal", cfg.t_max, cfg.d, Init::Normal, rng, kInitStd, false);
  for (int k = 0; k < cfg.depth; ++k)
    blocks_.push_back(add_block(store, "video.block" + std::to_string(k), cfg.d, rng));
  if (cfg.depth > 0) {
    norm_g_ = &store.add("video.norm.g", 1, cfg.d, Init::Ones, rng, 0.0, false);
    norm_b_ = &store.add("video.norm.b", 1, cfg.d, Init::Zeros, rng, 0.0, false);
  }
}

void VideoEncoder::check_frames(int frames) const {
  if (frames < 1) throw InputError("video encoder: no frames");
  if (frames > cfg_.t_max)
    throw ConfigError("video encoder: " + std::to_string(frames) + " frames exceed t_max " +
                      std::to_string(cfg_.t_max));
}

Var VideoEncoder::embed_patches(Tape& t, const data::PatchGrid& grid) const {
  if (grid.rows != cfg_.grid_h || grid.cols != cfg_.grid_w || grid.patches.cols() != cfg_.patch_dim)
    throw InputError("video encoder: patch grid does not match the configured geometry");
  check_frames(grid.frames);
  return apply_linear(t, t.constant(grid.patches), proj_);
}

Var VideoEncoder::positions(Tape& t, int frames) const {
  check_frames(frames);
  return ops::video_positions(t, t.param(*pos_spatial_), t.param(*pos_temporal_), frames, true);
}

Var VideoEncoder::add_positions(Tape& t, Var u, int frames) const {
  check_frames(frames);
  const bool temporal = cfg_.variant == Variant::VT;
  return ops::add(t, u,
                  ops::video_positions(t, t.param(*pos_spatial_), t.param(*pos_temporal_), frames, temporal));
}

Var VideoEncoder::encode(Tape& t, Var x, int frames) const {
  check_frames(frames);
  const Dims3 dims{frames, cfg_.grid_h, cfg_.grid_w};
  for (int k = 0; k < cfg_.depth; ++k) {
    Dims3 window, shift;
    block_window(cfg_, frames, k, window, shift);
    const auto layout = window_layout(window_partition_3d(dims, window, shift, cfg_.pad_windows));
    x = transformer_block(t, x, blocks_[k], cfg_.heads, layout);
  }
  if (cfg_.depth > 0) x = ops::layer_norm(t, x, t.param(*norm_g_), t.param(*norm_b_));
  if (cfg_.variant == Variant::Mean) x = ops::frame_mean(t, x, frames);
  return x;
}

Var VideoEncoder::forward(Tape& t, const data::PatchGrid& grid) const {
  return encode(t, add_positions(t, embed_patches(t, grid), grid.frames), grid.frames);
}

}  // namespace violet::video
