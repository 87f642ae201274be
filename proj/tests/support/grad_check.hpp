// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Central finite-difference oracle. Test-only: it only ever evaluates the
// forward pass, so it stays independent of the backward code it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "violet/core/parameters.hpp"
#include "violet/core/random.hpp"
#include "violet/core/ops.hpp"
#include "violet/core/tape.hpp"

namespace violet::testing {

struct GradCheckResult {
  std::string name;
  double rel_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double analytic_norm = 0.0;
  int checked = 0;
};

using LossFn = std::function<Var(Tape&)>;

inline double eval_loss(const LossFn& fn) {
  Tape tape(false);
  const Var v = fn(tape);
  return tape.value(v)(0, 0);
}

/// Checks up to `max_entries` randomly chosen entries of every parameter.
inline std::vector<GradCheckResult> check_gradients(ParameterStore& store, const LossFn& fn,
                                                    int max_entries = 48, double h = 1e-5,
                                                    std::uint64_t seed = 7) {
  store.zero_grad();
  {
    Tape tape(true);
    const Var loss = fn(tape);
    tape.backward(loss);
  }
  Rng rng(seed);
  std::vector<GradCheckResult> out;
  for (auto& p : store) {
    std::vector<std::size_t> idx(p.value.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (static_cast<int>(idx.size()) > max_entries) {
      rng.shuffle(std::span<std::size_t>(idx));
      idx.resize(max_entries);
    }
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i : idx) {
      const double saved = p.value.data()[i];
      p.value.data()[i] = saved + h;
      const double up = eval_loss(fn);
      p.value.data()[i] = saved - h;
      const double down = eval_loss(fn);
      p.value.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p.grad.data()[i];
      diff2 += (analytic - numeric) * (analytic - numeric);
      a2 += analytic * analytic;
      n2 += numeric * numeric;
    }
    GradCheckResult r;
    r.name = p.name;
    r.checked = static_cast<int>(idx.size());
    r.analytic_norm = std::sqrt(a2);
    const double denom = std::max(std::sqrt(a2), std::sqrt(n2));
    r.rel_error = denom < 1e-10 ? std::sqrt(diff2) : std::sqrt(diff2) / denom;
    out.push_back(r);
  }
  return out;
}

/// Reduces a matrix to a scalar with fixed random column weights so that every
/// output element receives a distinct gradient.
inline Var probe_sum(Tape& t, Var x, std::uint64_t seed = 99) {
  const Matrix& v = t.value(x);
  Rng rng(seed);
  Matrix w(v.cols(), 1);
  for (auto& e : w.values()) e = rng.normal();
  Var y = ops::matmul(t, x, t.constant(w));
  Matrix ones(1, t.value(y).rows(), 1.0);
  return ops::matmul(t, t.constant(ones), y);
}

}  // namespace violet::testing
