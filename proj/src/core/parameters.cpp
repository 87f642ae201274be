// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/core/parameters.hpp"

#include <algorithm>

#include "violet/core/errors.hpp"

namespace violet {

Parameter& ParameterStore::add(std::string name, int rows, int cols, Init init, Rng& rng,
                               double stddev, bool decay) {
  Matrix value(rows, cols, init == Init::Ones ? 1.0 : 0.0);
  if (init == Init::Normal) {
    // truncated at two standard deviations
    for (auto& v : value.values()) {
      double x = rng.normal();
      while (std::abs(x) > 2.0) x = rng.normal();
      v = x * stddev;
    }
  }
  return add(std::move(name), std::move(value), decay);
}

Parameter& ParameterStore::add(std::string name, Matrix value, bool decay) {
  if (index_.contains(name)) throw ConfigError("duplicate parameter '" + name + "'");
  index_.emplace(name, params_.size());
  Parameter& p = params_.emplace_back();
  p.name = std::move(name);
  p.grad = Matrix(value.rows(), value.cols());
  p.value = std::move(value);
  p.decay = decay;
  return p;
}

Parameter* ParameterStore::find(std::string_view name) {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &params_[it->second];
}

const Parameter* ParameterStore::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &params_[it->second];
}

Parameter& ParameterStore::at(std::string_view name) {
  if (auto* p = find(name)) return *p;
  throw ConfigError("no parameter named '" + std::string(name) + "'");
}

const Parameter& ParameterStore::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw ConfigError("no parameter named '" + std::string(name) + "'");
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

}  // namespace violet
