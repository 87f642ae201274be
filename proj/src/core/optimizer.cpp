// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/core/optimizer.hpp"

#include <cmath>

#include "violet/core/errors.hpp"
#include "violet/core/kernels.hpp"

namespace violet {

double AdamW::step(ParameterStore& params, double grad_scale) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value.rows(), p.value.cols());
      v_.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  if (m_.size() != params.size()) throw ConfigError("optimizer state does not match parameters");

  double sq = 0.0;
  for (const auto& p : params) sq += kernels::active().dot(p.grad.data(), p.grad.data(), static_cast<int>(p.grad.size()));
  const double norm = std::sqrt(sq) * std::abs(grad_scale);
  double gscale = grad_scale;
  if (cfg_.grad_clip > 0.0 && norm > cfg_.grad_clip) gscale *= cfg_.grad_clip / norm;

  ++steps_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
  std::size_t idx = 0;
  for (auto& p : params) {
    double* w = p.value.data();
    const double* g = p.grad.data();
    double* m = m_[idx].data();
    double* v = v_[idx].data();
    const double decay = p.decay ? cfg_.lr * cfg_.weight_decay : 0.0;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double gi = g[i] * gscale;
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= decay * w[i];
      w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    ++idx;
  }
  return norm;
}

}  // namespace violet
