// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/core/tape.hpp"

#include "violet/core/errors.hpp"
#include "violet/core/kernels.hpp"

namespace violet {

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{it->second};
  Backward bw;
  if (grad_enabled_) {
    bw = [&p](Tape&, const Matrix& g) {
      kernels::active().axpy(static_cast<int>(g.size()), 1.0, g.data(), p.grad.data());
    };
  }
  const Var v = push(Matrix{}, grad_enabled_, std::move(bw));
  nodes_[v.id].external = &p.value;
  param_nodes_.emplace(&p, v.id);
  return v;
}

Var Tape::push(Matrix value, bool requires_grad, Backward backward) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = grad_enabled_ && requires_grad;
  if (n.requires_grad) n.backward = std::move(backward);
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::grad(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.empty()) {
    const Matrix& val = value(v);
    if (!val.empty()) n.grad = Matrix(val.rows(), val.cols());
  }
  return n.grad;
}

void Tape::backward(Var root, double seed) {
  if (!grad_enabled_) throw InputError("backward() on a tape recorded without gradients");
  const Matrix& rv = value(root);
  if (rv.rows() != 1 || rv.cols() != 1) throw InputError("backward() root must be a scalar");
  if (!requires_grad(root)) return;
  grad(root)(0, 0) += seed;
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

}  // namespace violet
