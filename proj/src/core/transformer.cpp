// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/core/transformer.hpp"

#include <cmath>

namespace violet {

LinearParams add_linear(ParameterStore& store, const std::string& prefix, int in, int out, Rng& rng,
                        double stddev) {
  LinearParams p;
  p.w = &store.add(prefix + ".w", in, out, Init::Normal, rng, stddev);
  p.b = &store.add(prefix + ".b", 1, out, Init::Zeros, rng, 0.0, false);
  return p;
}

LinearParams add_linear(ParameterStore& store, const std::string& prefix, int in, int out, Rng& rng) {
  return add_linear(store, prefix, in, out, rng, 1.0 / std::sqrt(static_cast<double>(in)));
}

Var apply_linear(Tape& t, Var x, const LinearParams& p) {
  return ops::linear(t, x, t.param(*p.w), t.param(*p.b));
}

BlockParams add_block(ParameterStore& store, const std::string& prefix, int d, Rng& rng) {
  BlockParams p;
  p.ln1_g = &store.add(prefix + ".ln1.g", 1, d, Init::Ones, rng, 0.0, false);
  p.ln1_b = &store.add(prefix + ".ln1.b", 1, d, Init::Zeros, rng, 0.0, false);
  const auto qkv = add_linear(store, prefix + ".qkv", d, 3 * d, rng);
  const auto proj = add_linear(store, prefix + ".proj", d, d, rng);
  p.qkv_w = qkv.w;
  p.qkv_b = qkv.b;
  p.proj_w = proj.w;
  p.proj_b = proj.b;
  p.ln2_g = &store.add(prefix + ".ln2.g", 1, d, Init::Ones, rng, 0.0, false);
  p.ln2_b = &store.add(prefix + ".ln2.b", 1, d, Init::Zeros, rng, 0.0, false);
  const auto fc1 = add_linear(store, prefix + ".fc1", d, kMlpRatio * d, rng);
  const auto fc2 = add_linear(store, prefix + ".fc2", kMlpRatio * d, d, rng);
  p.fc1_w = fc1.w;
  p.fc1_b = fc1.b;
  p.fc2_w = fc2.w;
  p.fc2_b = fc2.b;
  return p;
}

Var transformer_block(Tape& t, Var x, const BlockParams& p, int heads, const AttentionLayout& layout,
                      AttentionCapture* capture) {
  Var h = ops::layer_norm(t, x, t.param(*p.ln1_g), t.param(*p.ln1_b));
  h = ops::linear(t, h, t.param(*p.qkv_w), t.param(*p.qkv_b));
  h = ops::attention(t, h, heads, layout, capture);
  h = ops::linear(t, h, t.param(*p.proj_w), t.param(*p.proj_b));
  x = ops::add(t, x, h);
  h = ops::layer_norm(t, x, t.param(*p.ln2_g), t.param(*p.ln2_b));
  h = ops::gelu(t, ops::linear(t, h, t.param(*p.fc1_w), t.param(*p.fc1_b)));
  h = ops::linear(t, h, t.param(*p.fc2_w), t.param(*p.fc2_b));
  return ops::add(t, x, h);
}

}  // namespace violet
