// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "violet/core/kernels.hpp"

namespace violet::kernels {

namespace {

void gemm_nn(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
             int ldc, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<long>(i) * ldc;
    if (!accumulate) {
      for (int j = 0; j < n; ++j) crow[j] = 0.0;
    }
    for (int p = 0; p < k; ++p) {
      const double av = a[static_cast<long>(i) * lda + p];
      const double* brow = b + static_cast<long>(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
             int ldc, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<long>(i) * lda;
    for (int j = 0; j < n; ++j) {
      const double* brow = b + static_cast<long>(j) * ldb;
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
      double& out = c[static_cast<long>(i) * ldc + j];
      out = accumulate ? out + s : s;
    }
  }
}

void gemm_tn(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
             int ldc, bool accumulate) {
  if (!accumulate) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) c[static_cast<long>(i) * ldc + j] = 0.0;
  }
  for (int p = 0; p < k; ++p) {
    const double* arow = a + static_cast<long>(p) * lda;
    const double* brow = b + static_cast<long>(p) * ldb;
    for (int i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c + static_cast<long>(i) * ldc;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

double dot(const double* x, const double* y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(int n, double alpha, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance(const double* x, const double* y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void softmax(double* row, int n) {
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) mx = row[i] > mx ? row[i] : mx;
  if (mx == -std::numeric_limits<double>::infinity()) {
    for (int i = 0; i < n; ++i) row[i] = 0.0;
    return;
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    row[i] = std::exp(row[i] - mx);
    sum += row[i];
  }
  const double inv = 1.0 / sum;
  for (int i = 0; i < n; ++i) row[i] *= inv;
}

double layer_norm(const double* x, const double* gamma, const double* beta, int n, double eps,
                  double* xhat, double* y) {
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += x[i];
  mean /= n;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    var += d * d;
  }
  var /= n;
  const double rstd = 1.0 / std::sqrt(var + eps);
  for (int i = 0; i < n; ++i) {
    xhat[i] = (x[i] - mean) * rstd;
    y[i] = gamma[i] * xhat[i] + beta[i];
  }
  return rstd;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", gemm_nn, gemm_nt, gemm_tn, dot,
                                 axpy,     squared_distance, softmax, layer_norm};
  return table;
}

}  // namespace violet::kernels
