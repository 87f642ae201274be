// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "violet/core/tape.hpp"

namespace violet {

/// Rows that attend to each other. `region` (same length as `rows`, or empty
/// for a single region) restricts attention to rows with equal labels; this is
/// how shifted windows keep wrapped-around positions apart.
struct AttentionGroup {
  std::vector<int> rows;
  std::vector<int> region;
};

struct AttentionLayout {
  int sequence_length = 0;
  std::vector<AttentionGroup> groups;
  /// Per-row key validity; empty means every row may be attended to.
  std::vector<char> key_valid;

  static AttentionLayout full(int length, std::vector<char> key_valid = {});
};

/// Receives the attention probabilities of one attention call, indexed
/// [group * heads + head], each |group| x |group| and row-stochastic.
struct AttentionCapture {
  int heads = 0;
  std::vector<Matrix> probs;
};

namespace ops {

/// x * w (+ b). w is in x out, b is 1 x out (pass an invalid Var for no bias).
Var linear(Tape& t, Var x, Var w, Var b);
Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
/// Adds a 1 x d row to every row of x.
Var add_row(Tape& t, Var x, Var row);
Var scale(Tape& t, Var x, double s);
Var layer_norm(Tape& t, Var x, Var gamma, Var beta, double eps = 1e-5);
/// tanh-approximated GELU.
Var gelu(Tape& t, Var x);
Var transpose(Tape& t, Var x);
Var gather_rows(Tape& t, Var x, std::vector<int> rows);
Var concat_rows(Tape& t, std::span<const Var> parts);
Var stop_gradient(Tape& t, Var x);
/// Forward value of q, gradient routed to z unchanged (straight-through).
Var straight_through(Tape& t, Var z, Var q);

/// Rows laid out as frames x sites. Row (t, s) = spatial[s] + temporal[t]
/// (temporal term omitted when use_temporal is false).
Var video_positions(Tape& t, Var spatial, Var temporal, int frames, bool use_temporal);
/// Rows laid out as frames x sites; every row (t, s) becomes mean over t' of
/// row (t', s), summed in sorted order (exactly permutation-invariant).
Var frame_mean(Tape& t, Var x, int frames);

/// Multi-head scaled dot-product attention over a packed [Q | K | V] input
/// (rows x 3d). Returns rows x d.
Var attention(Tape& t, Var qkv, int heads, const AttentionLayout& layout,
              AttentionCapture* capture = nullptr);

/// sum_i w_i * CE(softmax(logits_i), targets_i). Rows with weight 0 are skipped.
Var cross_entropy(Tape& t, Var logits, std::span<const int> targets,
                  std::span<const double> weights);
/// -[y log sigmoid(x) + (1 - y) log(1 - sigmoid(x))] for a 1x1 logit.
Var bce_with_logits(Tape& t, Var logit, double label);
/// sum_r w_r * mean_c smoothL1(pred - target), beta = 1.
Var smooth_l1(Tape& t, Var pred, const Matrix& target, std::span<const double> row_weights);
/// mean((a - b)^2)
Var mse(Tape& t, Var a, Var b);
/// sum_i w_i * s_i over 1x1 inputs.
Var weighted_sum(Tape& t, std::span<const Var> scalars, std::span<const double> weights);

}  // namespace ops
}  // namespace violet
