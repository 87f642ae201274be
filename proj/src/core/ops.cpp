// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "violet/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "violet/core/errors.hpp"
#include "violet/core/kernels.hpp"

namespace violet {

AttentionLayout AttentionLayout::full(int length, std::vector<char> key_valid) {
  AttentionLayout layout;
  layout.sequence_length = length;
  AttentionGroup g;
  g.rows.resize(length);
  for (int i = 0; i < length; ++i) g.rows[i] = i;
  layout.groups.push_back(std::move(g));
  layout.key_valid = std::move(key_valid);
  return layout;
}

namespace ops {

namespace {

const kernels::KernelTable& K() { return kernels::active(); }

void require(bool ok, const char* what) {
  if (!ok) throw InputError(std::string("shape mismatch in ") + what);
}

bool any_grad(const Tape& t, std::initializer_list<Var> vars) {
  for (Var v : vars)
    if (v.valid() && t.requires_grad(v)) return true;
  return false;
}

void add_into(Matrix& dst, const Matrix& src) {
  K().axpy(static_cast<int>(src.size()), 1.0, src.data(), dst.data());
}

}  // namespace

Var linear(Tape& t, Var x, Var w, Var b) {
  const Matrix& xv = t.value(x);
  const Matrix& wv = t.value(w);
  require(xv.cols() == wv.rows(), "linear");
  const int n = xv.rows(), in = xv.cols(), out = wv.cols();
  Matrix y(n, out);
  K().gemm_nn(n, out, in, xv.data(), in, wv.data(), out, y.data(), out, false);
  if (b.valid()) {
    const Matrix& bv = t.value(b);
    require(bv.rows() == 1 && bv.cols() == out, "linear bias");
    for (int i = 0; i < n; ++i) K().axpy(out, 1.0, bv.data(), y.data() + static_cast<long>(i) * out);
  }
  return t.push(std::move(y), any_grad(t, {x, w, b}), [x, w, b, n, in, out](Tape& t, const Matrix& g) {
    if (t.requires_grad(x)) {
      K().gemm_nt(n, in, out, g.data(), out, t.value(w).data(), out, t.grad(x).data(), in, true);
    }
    if (t.requires_grad(w)) {
      K().gemm_tn(in, out, n, t.value(x).data(), in, g.data(), out, t.grad(w).data(), out, true);
    }
    if (b.valid() && t.requires_grad(b)) {
      double* db = t.grad(b).data();
      for (int i = 0; i < n; ++i) K().axpy(out, 1.0, g.data() + static_cast<long>(i) * out, db);
    }
  });
}

Var matmul(Tape& t, Var a, Var b) { return linear(t, a, b, Var{}); }

Var add(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  require(av.same_shape(bv), "add");
  Matrix y = av;
  add_into(y, bv);
  return t.push(std::move(y), any_grad(t, {a, b}), [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) add_into(t.grad(a), g);
    if (t.requires_grad(b)) add_into(t.grad(b), g);
  });
}

Var add_row(Tape& t, Var x, Var row) {
  const Matrix& xv = t.value(x);
  const Matrix& rv = t.value(row);
  require(rv.rows() == 1 && rv.cols() == xv.cols(), "add_row");
  Matrix y = xv;
  const int d = xv.cols();
  for (int i = 0; i < xv.rows(); ++i) K().axpy(d, 1.0, rv.data(), y.data() + static_cast<long>(i) * d);
  return t.push(std::move(y), any_grad(t, {x, row}), [x, row, d](Tape& t, const Matrix& g) {
    if (t.requires_grad(x)) add_into(t.grad(x), g);
    if (t.requires_grad(row)) {
      double* dr = t.grad(row).data();
      for (int i = 0; i < g.rows(); ++i) K().axpy(d, 1.0, g.data() + static_cast<long>(i) * d, dr);
    }
  });
}

Var scale(Tape& t, Var x, double s) {
  Matrix y = t.value(x);
  for (auto& v : y.values()) v *= s;
  return t.push(std::move(y), any_grad(t, {x}), [x, s](Tape& t, const Matrix& g) {
    K().axpy(static_cast<int>(g.size()), s, g.data(), t.grad(x).data());
  });
}

Var layer_norm(Tape& t, Var x, Var gamma, Var beta, double eps) {
  const Matrix& xv = t.value(x);
  const int n = xv.rows(), d = xv.cols();
  require(t.value(gamma).cols() == d && t.value(beta).cols() == d, "layer_norm");
  Matrix y(n, d);
  auto xhat = std::make_shared<Matrix>(n, d);
  auto rstd = std::make_shared<std::vector<double>>(n);
  const double* gp = t.value(gamma).data();
  const double* bp = t.value(beta).data();
  for (int i = 0; i < n; ++i) {
    (*rstd)[i] = K().layer_norm(xv.data() + static_cast<long>(i) * d, gp, bp, d, eps,
                                xhat->data() + static_cast<long>(i) * d,
                                y.data() + static_cast<long>(i) * d);
  }
  return t.push(std::move(y), any_grad(t, {x, gamma, beta}),
                [x, gamma, beta, xhat, rstd, n, d](Tape& t, const Matrix& g) {
                  const double* gp = t.value(gamma).data();
                  if (t.requires_grad(gamma) || t.requires_grad(beta)) {
                    Matrix& dg = t.grad(gamma);
                    Matrix& db = t.grad(beta);
                    for (int i = 0; i < n; ++i) {
                      const double* gr = g.data() + static_cast<long>(i) * d;
                      const double* xh = xhat->data() + static_cast<long>(i) * d;
                      for (int j = 0; j < d; ++j) {
                        dg.data()[j] += gr[j] * xh[j];
                        db.data()[j] += gr[j];
                      }
                    }
                  }
                  if (t.requires_grad(x)) {
                    Matrix& dx = t.grad(x);
                    std::vector<double> dxh(d);
                    for (int i = 0; i < n; ++i) {
                      const double* gr = g.data() + static_cast<long>(i) * d;
                      const double* xh = xhat->data() + static_cast<long>(i) * d;
                      double mean_dxh = 0.0, mean_dxh_xh = 0.0;
                      for (int j = 0; j < d; ++j) {
                        dxh[j] = gr[j] * gp[j];
                        mean_dxh += dxh[j];
                        mean_dxh_xh += dxh[j] * xh[j];
                      }
                      mean_dxh /= d;
                      mean_dxh_xh /= d;
                      double* out = dx.data() + static_cast<long>(i) * d;
                      const double r = (*rstd)[i];
                      for (int j = 0; j < d; ++j) out[j] += r * (dxh[j] - mean_dxh - xh[j] * mean_dxh_xh);
                    }
                  }
                });
}

Var transpose(Tape& t, Var x) {
  const Matrix& xv = t.value(x);
  Matrix y(xv.cols(), xv.rows());
  for (int r = 0; r < xv.rows(); ++r)
    for (int c = 0; c < xv.cols(); ++c) y(c, r) = xv(r, c);
  return t.push(std::move(y), any_grad(t, {x}), [x](Tape& t, const Matrix& g) {
    Matrix& dx = t.grad(x);
    for (int r = 0; r < dx.rows(); ++r)
      for (int c = 0; c < dx.cols(); ++c) dx(r, c) += g(c, r);
  });
}

Var gelu(Tape& t, Var x) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double kA = 0.044715;
  const Matrix& xv = t.value(x);
  Matrix y(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv.data()[i];
    y.data()[i] = 0.5 * v * (1.0 + std::tanh(kC * (v + kA * v * v * v)));
  }
  return t.push(std::move(y), any_grad(t, {x}), [x](Tape& t, const Matrix& g) {
    const Matrix& xv = t.value(x);
    double* dx = t.grad(x).data();
    for (std::size_t i = 0; i < xv.size(); ++i) {
      const double v = xv.data()[i];
      const double inner = kC * (v + kA * v * v * v);
      const double th = std::tanh(inner);
      const double dinner = kC * (1.0 + 3.0 * kA * v * v);
      dx[i] += g.data()[i] * (0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * dinner);
    }
  });
}

Var gather_rows(Tape& t, Var x, std::vector<int> rows) {
  const Matrix& xv = t.value(x);
  const int d = xv.cols();
  Matrix y(static_cast<int>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= xv.rows()) throw InputError("gather_rows index out of range");
    std::copy_n(xv.data() + static_cast<long>(rows[i]) * d, d, y.data() + i * d);
  }
  return t.push(std::move(y), any_grad(t, {x}), [x, rows = std::move(rows), d](Tape& t, const Matrix& g) {
    Matrix& dx = t.grad(x);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      K().axpy(d, 1.0, g.data() + i * d, dx.data() + static_cast<long>(rows[i]) * d);
    }
  });
}

Var concat_rows(Tape& t, std::span<const Var> parts) {
  int rows = 0;
  const int d = t.value(parts[0]).cols();
  bool needs = false;
  for (Var p : parts) {
    require(t.value(p).cols() == d, "concat_rows");
    rows += t.value(p).rows();
    needs = needs || t.requires_grad(p);
  }
  Matrix y(rows, d);
  long offset = 0;
  for (Var p : parts) {
    const Matrix& pv = t.value(p);
    std::copy_n(pv.data(), pv.size(), y.data() + offset);
    offset += static_cast<long>(pv.size());
  }
  std::vector<Var> ins(parts.begin(), parts.end());
  return t.push(std::move(y), needs, [ins = std::move(ins)](Tape& t, const Matrix& g) {
    long offset = 0;
    for (Var p : ins) {
      const long n = static_cast<long>(t.value(p).size());
      if (t.requires_grad(p)) K().axpy(static_cast<int>(n), 1.0, g.data() + offset, t.grad(p).data());
      offset += n;
    }
  });
}

Var stop_gradient(Tape& t, Var x) { return t.constant(t.value(x)); }

Var straight_through(Tape& t, Var z, Var q) {
  require(t.value(z).same_shape(t.value(q)), "straight_through");
  return t.push(t.value(q), any_grad(t, {z}), [z](Tape& t, const Matrix& g) { add_into(t.grad(z), g); });
}

Var video_positions(Tape& t, Var spatial, Var temporal, int frames, bool use_temporal) {
  const Matrix& sv = t.value(spatial);
  const Matrix& tv = t.value(temporal);
  const int sites = sv.rows(), d = sv.cols();
  if (use_temporal && frames > tv.rows()) throw ConfigError("more frames than temporal positions");
  Matrix y(frames * sites, d);
  for (int f = 0; f < frames; ++f) {
    for (int s = 0; s < sites; ++s) {
      double* out = y.data() + (static_cast<long>(f) * sites + s) * d;
      std::copy_n(sv.data() + static_cast<long>(s) * d, d, out);
      if (use_temporal) K().axpy(d, 1.0, tv.data() + static_cast<long>(f) * d, out);
    }
  }
  return t.push(std::move(y), any_grad(t, {spatial, temporal}),
                [spatial, temporal, frames, sites, d, use_temporal](Tape& t, const Matrix& g) {
                  for (int f = 0; f < frames; ++f) {
                    for (int s = 0; s < sites; ++s) {
                      const double* gr = g.data() + (static_cast<long>(f) * sites + s) * d;
                      if (t.requires_grad(spatial))
                        K().axpy(d, 1.0, gr, t.grad(spatial).data() + static_cast<long>(s) * d);
                      if (use_temporal && t.requires_grad(temporal))
                        K().axpy(d, 1.0, gr, t.grad(temporal).data() + static_cast<long>(f) * d);
                    }
                  }
                });
}

Var frame_mean(Tape& t, Var x, int frames) {
  const Matrix& xv = t.value(x);
  require(xv.rows() % frames == 0, "frame_mean");
  const int sites = xv.rows() / frames, d = xv.cols();
  // Values are summed in sorted order so the result is bit-identical under
  // any permutation of the frames.
  Matrix mean(sites, d);
  std::vector<double> column(frames);
  const long stride = static_cast<long>(sites) * d;
  for (long e = 0; e < stride; ++e) {
    for (int f = 0; f < frames; ++f) column[f] = xv.data()[f * stride + e];
    std::sort(column.begin(), column.end());
    double s = 0.0;
    for (double v : column) s += v;
    mean.data()[e] = s / frames;
  }
  Matrix y(xv.rows(), d);
  for (int f = 0; f < frames; ++f)
    std::copy_n(mean.data(), mean.size(), y.data() + static_cast<long>(f) * sites * d);
  return t.push(std::move(y), any_grad(t, {x}), [x, frames, sites, d](Tape& t, const Matrix& g) {
    Matrix sum(sites, d);
    for (int f = 0; f < frames; ++f)
      K().axpy(sites * d, 1.0, g.data() + static_cast<long>(f) * sites * d, sum.data());
    Matrix& dx = t.grad(x);
    for (int f = 0; f < frames; ++f)
      K().axpy(sites * d, 1.0 / frames, sum.data(), dx.data() + static_cast<long>(f) * sites * d);
  });
}

namespace {

struct GroupHeadCache {
  Matrix q, k, v, p;  // n x dh (q, k, v), n x n (p)
};

void gather_block(const Matrix& src, const std::vector<int>& rows, int col0, int width, Matrix& dst) {
  dst = Matrix(static_cast<int>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(src.data() + static_cast<long>(rows[i]) * src.cols() + col0, width,
                dst.data() + i * width);
  }
}

void scatter_add_block(Matrix& dst, const std::vector<int>& rows, int col0, const Matrix& src) {
  const int width = src.cols();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    K().axpy(width, 1.0, src.data() + i * width, dst.data() + static_cast<long>(rows[i]) * dst.cols() + col0);
  }
}

}  // namespace

Var attention(Tape& t, Var qkv, int heads, const AttentionLayout& layout, AttentionCapture* capture) {
  const Matrix& in = t.value(qkv);
  require(in.cols() % 3 == 0, "attention input");
  const int d = in.cols() / 3;
  require(d % heads == 0, "attention heads");
  require(in.rows() == layout.sequence_length, "attention layout");
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  Matrix out(in.rows(), d);
  auto cache = std::make_shared<std::vector<GroupHeadCache>>(layout.groups.size() * heads);
  if (capture != nullptr) {
    capture->heads = heads;
    capture->probs.clear();
  }
  for (std::size_t gi = 0; gi < layout.groups.size(); ++gi) {
    const AttentionGroup& grp = layout.groups[gi];
    const int n = static_cast<int>(grp.rows.size());
    for (int h = 0; h < heads; ++h) {
      GroupHeadCache& c = (*cache)[gi * heads + h];
      gather_block(in, grp.rows, h * dh, dh, c.q);
      gather_block(in, grp.rows, d + h * dh, dh, c.k);
      gather_block(in, grp.rows, 2 * d + h * dh, dh, c.v);
      c.p = Matrix(n, n);
      K().gemm_nt(n, n, dh, c.q.data(), dh, c.k.data(), dh, c.p.data(), n, false);
      for (int i = 0; i < n; ++i) {
        double* prow = c.p.data() + static_cast<long>(i) * n;
        for (int j = 0; j < n; ++j) {
          const bool same_region = grp.region.empty() || grp.region[i] == grp.region[j];
          const bool key_ok = layout.key_valid.empty() || layout.key_valid[grp.rows[j]] != 0;
          prow[j] = (same_region && key_ok) ? prow[j] * scale : kNegInf;
        }
        K().softmax(prow, n);
      }
      Matrix o(n, dh);
      K().gemm_nn(n, dh, n, c.p.data(), n, c.v.data(), dh, o.data(), dh, false);
      scatter_add_block(out, grp.rows, h * dh, o);
      if (capture != nullptr) capture->probs.push_back(c.p);
    }
  }

  // The layout is captured by value: callers may rebuild theirs per forward.
  return t.push(std::move(out), any_grad(t, {qkv}),
                [qkv, heads, d, dh, scale, layout, cache](Tape& t, const Matrix& g) {
                  Matrix& dqkv = t.grad(qkv);
                  for (std::size_t gi = 0; gi < layout.groups.size(); ++gi) {
                    const AttentionGroup& grp = layout.groups[gi];
                    const int n = static_cast<int>(grp.rows.size());
                    for (int h = 0; h < heads; ++h) {
                      const GroupHeadCache& c = (*cache)[gi * heads + h];
                      Matrix dout;
                      gather_block(g, grp.rows, h * dh, dh, dout);
                      Matrix dv(n, dh), dp(n, n);
                      K().gemm_tn(n, dh, n, c.p.data(), n, dout.data(), dh, dv.data(), dh, false);
                      K().gemm_nt(n, n, dh, dout.data(), dh, c.v.data(), dh, dp.data(), n, false);
                      for (int i = 0; i < n; ++i) {
                        const double* pr = c.p.data() + static_cast<long>(i) * n;
                        double* dr = dp.data() + static_cast<long>(i) * n;
                        const double rowdot = K().dot(pr, dr, n);
                        for (int j = 0; j < n; ++j) dr[j] = pr[j] * (dr[j] - rowdot) * scale;
                      }
                      Matrix dq(n, dh), dk(n, dh);
                      K().gemm_nn(n, dh, n, dp.data(), n, c.k.data(), dh, dq.data(), dh, false);
                      K().gemm_tn(n, dh, n, dp.data(), n, c.q.data(), dh, dk.data(), dh, false);
                      scatter_add_block(dqkv, grp.rows, h * dh, dq);
                      scatter_add_block(dqkv, grp.rows, d + h * dh, dk);
                      scatter_add_block(dqkv, grp.rows, 2 * d + h * dh, dv);
                    }
                  }
                });
}

Var cross_entropy(Tape& t, Var logits, std::span<const int> targets, std::span<const double> weights) {
  const Matrix& lv = t.value(logits);
  require(static_cast<int>(targets.size()) == lv.rows(), "cross_entropy targets");
  require(weights.size() == targets.size(), "cross_entropy weights");
  const int n = lv.rows(), c = lv.cols();
  auto probs = std::make_shared<Matrix>(n, c);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    if (weights[i] == 0.0) continue;
    if (targets[i] < 0 || targets[i] >= c) throw InputError("cross_entropy target out of range");
    double* pr = probs->data() + static_cast<long>(i) * c;
    std::copy_n(lv.data() + static_cast<long>(i) * c, c, pr);
    double mx = pr[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, pr[j]);
    double sum = 0.0;
    for (int j = 0; j < c; ++j) sum += std::exp(pr[j] - mx);
    const double lse = mx + std::log(sum);
    loss += weights[i] * (lse - lv(i, targets[i]));
    for (int j = 0; j < c; ++j) pr[j] = std::exp(pr[j] - lse);
  }
  std::vector<int> tg(targets.begin(), targets.end());
  std::vector<double> wt(weights.begin(), weights.end());
  return t.push(Matrix(1, 1, loss), any_grad(t, {logits}),
                [logits, probs, tg = std::move(tg), wt = std::move(wt), n, c](Tape& t, const Matrix& g) {
                  Matrix& dl = t.grad(logits);
                  const double g0 = g(0, 0);
                  for (int i = 0; i < n; ++i) {
                    if (wt[i] == 0.0) continue;
                    const double s = g0 * wt[i];
                    const double* pr = probs->data() + static_cast<long>(i) * c;
                    double* dr = dl.data() + static_cast<long>(i) * c;
                    for (int j = 0; j < c; ++j) dr[j] += s * pr[j];
                    dr[tg[i]] -= s;
                  }
                });
}

Var bce_with_logits(Tape& t, Var logit, double label) {
  const Matrix& lv = t.value(logit);
  require(lv.rows() == 1 && lv.cols() == 1, "bce_with_logits");
  const double x = lv(0, 0);
  const double loss = std::max(x, 0.0) - x * label + std::log1p(std::exp(-std::abs(x)));
  return t.push(Matrix(1, 1, loss), any_grad(t, {logit}), [logit, x, label](Tape& t, const Matrix& g) {
    const double sig = 1.0 / (1.0 + std::exp(-x));
    t.grad(logit)(0, 0) += g(0, 0) * (sig - label);
  });
}

Var smooth_l1(Tape& t, Var pred, const Matrix& target, std::span<const double> row_weights) {
  const Matrix& pv = t.value(pred);
  require(pv.same_shape(target), "smooth_l1");
  require(static_cast<int>(row_weights.size()) == pv.rows(), "smooth_l1 weights");
  const int n = pv.rows(), c = pv.cols();
  auto diff = std::make_shared<Matrix>(n, c);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    if (row_weights[i] == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < c; ++j) {
      const double dlt = pv(i, j) - target(i, j);
      (*diff)(i, j) = dlt;
      row += std::abs(dlt) < 1.0 ? 0.5 * dlt * dlt : std::abs(dlt) - 0.5;
    }
    loss += row_weights[i] * row / c;
  }
  std::vector<double> wt(row_weights.begin(), row_weights.end());
  return t.push(Matrix(1, 1, loss), any_grad(t, {pred}), [pred, diff, wt = std::move(wt), n, c](Tape& t, const Matrix& g) {
    Matrix& dp = t.grad(pred);
    for (int i = 0; i < n; ++i) {
      if (wt[i] == 0.0) continue;
      const double s = g(0, 0) * wt[i] / c;
      for (int j = 0; j < c; ++j) dp(i, j) += s * std::clamp((*diff)(i, j), -1.0, 1.0);
    }
  });
}

Var mse(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  require(av.same_shape(bv), "mse");
  const double n = static_cast<double>(av.size());
  const double loss = K().squared_distance(av.data(), bv.data(), static_cast<int>(av.size())) / n;
  return t.push(Matrix(1, 1, loss), any_grad(t, {a, b}), [a, b, n](Tape& t, const Matrix& g) {
    const Matrix& av = t.value(a);
    const Matrix& bv = t.value(b);
    const double s = 2.0 * g(0, 0) / n;
    if (t.requires_grad(a)) {
      double* da = t.grad(a).data();
      for (std::size_t i = 0; i < av.size(); ++i) da[i] += s * (av.data()[i] - bv.data()[i]);
    }
    if (t.requires_grad(b)) {
      double* db = t.grad(b).data();
      for (std::size_t i = 0; i < av.size(); ++i) db[i] -= s * (av.data()[i] - bv.data()[i]);
    }
  });
}

Var weighted_sum(Tape& t, std::span<const Var> scalars, std::span<const double> weights) {
  require(scalars.size() == weights.size(), "weighted_sum");
  double total = 0.0;
  bool needs = false;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    total += weights[i] * t.value(scalars[i])(0, 0);
    needs = needs || t.requires_grad(scalars[i]);
  }
  std::vector<Var> ins(scalars.begin(), scalars.end());
  std::vector<double> wt(weights.begin(), weights.end());
  return t.push(Matrix(1, 1, total), needs, [ins = std::move(ins), wt = std::move(wt)](Tape& t, const Matrix& g) {
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if (t.requires_grad(ins[i])) t.grad(ins[i])(0, 0) += g(0, 0) * wt[i];
    }
  });
}

}  // namespace ops
}  // namespace violet
