// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

#include "violet/core/matrix.hpp"
#include "violet/core/parameters.hpp"

namespace violet {

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const noexcept { return id >= 0; }
};

/// Reverse-mode autodiff tape. Ops append nodes in evaluation order; backward()
/// walks them in reverse and finally adds parameter gradients into
/// Parameter::grad. A tape built with grad disabled records values only.
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& grad)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  bool grad_enabled() const noexcept { return grad_enabled_; }

  Var constant(Matrix value);
  /// One node per parameter per tape; repeated calls return the same Var.
  Var param(Parameter& p);
  Var push(Matrix value, bool requires_grad, Backward backward);

  const Matrix& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.external != nullptr ? *n.external : n.value;
  }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  /// Gradient buffer of `v`, zero-initialised on first access.
  Matrix& grad(Var v);

  /// Seeds d(root)/d(root) = seed; root must be 1x1.
  void backward(Var root, double seed = 1.0);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    const Matrix* external = nullptr;  // parameters are referenced, not copied
    Matrix grad;
    bool requires_grad = false;
    Backward backward;
  };

  bool grad_enabled_;
  std::deque<Node> nodes_;  // deque: values stay addressable while the tape grows
  std::unordered_map<const Parameter*, int> param_nodes_;
};

}  // namespace violet
