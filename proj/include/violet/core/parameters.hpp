// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <string>
#include <string_view>
#include <unordered_map>

#include "violet/core/matrix.hpp"
#include "violet/core/random.hpp"

namespace violet {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  bool decay = true;  // subject to decoupled weight decay
};

enum class Init { Zeros, Ones, Normal };

/// Owns every trainable tensor of a model. Iteration order is creation order,
/// which is also the serialization and optimizer-state order. Addresses are
/// stable for the store's lifetime.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  Parameter& add(std::string name, int rows, int cols, Init init, Rng& rng, double stddev = 0.02,
                 bool decay = true);
  Parameter& add(std::string name, Matrix value, bool decay = true);

  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;

  void zero_grad();
  std::size_t scalar_count() const;
  std::size_t size() const noexcept { return params_.size(); }

  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }

 private:
  std::deque<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace violet
