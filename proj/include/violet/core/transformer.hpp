// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "violet/core/ops.hpp"
#include "violet/core/parameters.hpp"

namespace violet {

/// Pre-norm residual block: x + Attn(LN(x)), then x + MLP(LN(x)).
struct BlockParams {
  Parameter* ln1_g = nullptr;
  Parameter* ln1_b = nullptr;
  Parameter* qkv_w = nullptr;
  Parameter* qkv_b = nullptr;
  Parameter* proj_w = nullptr;
  Parameter* proj_b = nullptr;
  Parameter* ln2_g = nullptr;
  Parameter* ln2_b = nullptr;
  Parameter* fc1_w = nullptr;
  Parameter* fc1_b = nullptr;
  Parameter* fc2_w = nullptr;
  Parameter* fc2_b = nullptr;
};

inline constexpr int kMlpRatio = 4;
inline constexpr double kInitStd = 0.02;

BlockParams add_block(ParameterStore& store, const std::string& prefix, int d, Rng& rng);

Var transformer_block(Tape& t, Var x, const BlockParams& p, int heads, const AttentionLayout& layout,
                      AttentionCapture* capture = nullptr);

/// Linear layer parameters "<prefix>.w" (in x out) and "<prefix>.b".
struct LinearParams {
  Parameter* w = nullptr;
  Parameter* b = nullptr;
};

LinearParams add_linear(ParameterStore& store, const std::string& prefix, int in, int out, Rng& rng,
                        double stddev);
/// Weights drawn with standard deviation 1 / sqrt(in).
LinearParams add_linear(ParameterStore& store, const std::string& prefix, int in, int out, Rng& rng);
Var apply_linear(Tape& t, Var x, const LinearParams& p);

}  // namespace violet
