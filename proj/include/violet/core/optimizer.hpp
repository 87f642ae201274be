// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "violet/core/matrix.hpp"
#include "violet/core/parameters.hpp"

namespace violet {

struct AdamWConfig {
  double lr = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double weight_decay = 1e-3;
  double grad_clip = 0.0;  // global L2 norm clip, 0 disables
};

/// AdamW with decoupled weight decay. State is keyed by position in the
/// ParameterStore, so the store must not grow after the first step.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  /// Applies one update from the accumulated Parameter::grad values,
  /// each multiplied by grad_scale first. Returns the pre-clip gradient norm.
  double step(ParameterStore& params, double grad_scale = 1.0);

  const AdamWConfig& config() const noexcept { return cfg_; }
  AdamWConfig& config() noexcept { return cfg_; }
  std::int64_t steps() const noexcept { return steps_; }

  // Serialization access.
  std::vector<Matrix>& first_moments() noexcept { return m_; }
  std::vector<Matrix>& second_moments() noexcept { return v_; }
  const std::vector<Matrix>& first_moments() const noexcept { return m_; }
  const std::vector<Matrix>& second_moments() const noexcept { return v_; }
  void set_steps(std::int64_t s) noexcept { steps_ = s; }

 private:
  AdamWConfig cfg_;
  std::int64_t steps_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace violet
