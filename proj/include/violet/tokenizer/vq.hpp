// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "violet/core/parameters.hpp"
#include "violet/data/video.hpp"

namespace violet::tokenizer {

struct TokenizerConfig {
  int K = 256;          // codebook size
  int patch = 8;        // equals the encoder patch size so grids align 1:1
  int resolution = 64;  // frame side the tokenizer accepts
  int hidden = 64;
  int code_dim = 16;
  int steps = 2000;
  int batch = 128;
  double lr = 2e-3;
  double commitment = 0.25;
  std::uint64_t seed = 0;
};

/// One id per patch; id (t, i, j) at ids[(t * rows + i) * cols + j].
struct TokenGrid {
  int frames = 0;
  int rows = 0;
  int cols = 0;
  std::vector<int> ids;

  int at(int t, int i, int j) const { return ids[(static_cast<std::size_t>(t) * rows + i) * cols + j]; }
  bool operator==(const TokenGrid&) const = default;
};

struct TrainTrace {
  std::vector<double> reconstruction_mse;  // per step, on the step's batch
  int reseeded_codes = 0;
  int distinct_patches = 0;
};

/// Per-patch vector-quantized autoencoder: MLP encoder to a code vector,
/// nearest-codebook quantization with a straight-through gradient, MLP decoder.
class VisualTokenizer {
 public:
  explicit VisualTokenizer(const TokenizerConfig& cfg);
  VisualTokenizer(VisualTokenizer&&) noexcept = default;

  static VisualTokenizer train(std::span<const data::Frame> frames, const TokenizerConfig& cfg,
                               TrainTrace* trace = nullptr);

  const TokenizerConfig& config() const noexcept { return cfg_; }
  int K() const noexcept { return cfg_.K; }
  const Matrix& codebook() const { return params_->at("codebook").value; }
  ParameterStore& parameters() { return *params_; }

  /// Encoder outputs (count x code_dim) for every patch of the grid.
  Matrix encode(const Matrix& patches) const;
  /// Nearest codebook row to `z` (code_dim values); ties go to the lower index.
  int nearest(const double* z) const;

  TokenGrid tokenize(const data::Frame& frame) const;
  TokenGrid tokenize(const data::PatchGrid& grid) const;
  /// Decodes one frame slice (frames == 1). Output clamped to [0, 1].
  data::Frame reconstruct(const TokenGrid& grid) const;

  double reconstruction_mse(std::span<const data::Frame> frames) const;

  void save(const std::filesystem::path& path) const;
  static VisualTokenizer load(const std::filesystem::path& path);

 private:
  Matrix decode(const Matrix& codes) const;
  void check_grid(const data::PatchGrid& grid) const;

  TokenizerConfig cfg_;
  std::unique_ptr<ParameterStore> params_;
};

}  // namespace violet::tokenizer
