// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <limits>
#include <vector>

#include "violet/core/kernels.hpp"

namespace violet::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d load_or_zero(const double* p, bool accumulate) {
  return accumulate ? _mm256_loadu_pd(p) : _mm256_setzero_pd();
}

// 4x8 register-blocked micro-kernel with 4x4 and scalar edges.
void gemm_nn(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
             int ldc, bool accumulate) {
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    const double* a0 = a + static_cast<long>(i) * lda;
    const double* a1 = a0 + lda;
    const double* a2 = a1 + lda;
    const double* a3 = a2 + lda;
    double* c0 = c + static_cast<long>(i) * ldc;
    double* c1 = c0 + ldc;
    double* c2 = c1 + ldc;
    double* c3 = c2 + ldc;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d r00 = _mm256_setzero_pd(), r01 = _mm256_setzero_pd();
      __m256d r10 = _mm256_setzero_pd(), r11 = _mm256_setzero_pd();
      __m256d r20 = _mm256_setzero_pd(), r21 = _mm256_setzero_pd();
      __m256d r30 = _mm256_setzero_pd(), r31 = _mm256_setzero_pd();
      const double* bp = b + j;
      for (int p = 0; p < k; ++p, bp += ldb) {
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        __m256d av = _mm256_broadcast_sd(a0 + p);
        r00 = _mm256_fmadd_pd(av, b0, r00);
        r01 = _mm256_fmadd_pd(av, b1, r01);
        av = _mm256_broadcast_sd(a1 + p);
        r10 = _mm256_fmadd_pd(av, b0, r10);
        r11 = _mm256_fmadd_pd(av, b1, r11);
        av = _mm256_broadcast_sd(a2 + p);
        r20 = _mm256_fmadd_pd(av, b0, r20);
        r21 = _mm256_fmadd_pd(av, b1, r21);
        av = _mm256_broadcast_sd(a3 + p);
        r30 = _mm256_fmadd_pd(av, b0, r30);
        r31 = _mm256_fmadd_pd(av, b1, r31);
      }
      _mm256_storeu_pd(c0 + j, _mm256_add_pd(load_or_zero(c0 + j, accumulate), r00));
      _mm256_storeu_pd(c0 + j + 4, _mm256_add_pd(load_or_zero(c0 + j + 4, accumulate), r01));
      _mm256_storeu_pd(c1 + j, _mm256_add_pd(load_or_zero(c1 + j, accumulate), r10));
      _mm256_storeu_pd(c1 + j + 4, _mm256_add_pd(load_or_zero(c1 + j + 4, accumulate), r11));
      _mm256_storeu_pd(c2 + j, _mm256_add_pd(load_or_zero(c2 + j, accumulate), r20));
      _mm256_storeu_pd(c2 + j + 4, _mm256_add_pd(load_or_zero(c2 + j + 4, accumulate), r21));
      _mm256_storeu_pd(c3 + j, _mm256_add_pd(load_or_zero(c3 + j, accumulate), r30));
      _mm256_storeu_pd(c3 + j + 4, _mm256_add_pd(load_or_zero(c3 + j + 4, accumulate), r31));
    }
    for (; j + 4 <= n; j += 4) {
      __m256d r0 = _mm256_setzero_pd(), r1 = _mm256_setzero_pd();
      __m256d r2 = _mm256_setzero_pd(), r3 = _mm256_setzero_pd();
      const double* bp = b + j;
      for (int p = 0; p < k; ++p, bp += ldb) {
        const __m256d bv = _mm256_loadu_pd(bp);
        r0 = _mm256_fmadd_pd(_mm256_broadcast_sd(a0 + p), bv, r0);
        r1 = _mm256_fmadd_pd(_mm256_broadcast_sd(a1 + p), bv, r1);
        r2 = _mm256_fmadd_pd(_mm256_broadcast_sd(a2 + p), bv, r2);
        r3 = _mm256_fmadd_pd(_mm256_broadcast_sd(a3 + p), bv, r3);
      }
      _mm256_storeu_pd(c0 + j, _mm256_add_pd(load_or_zero(c0 + j, accumulate), r0));
      _mm256_storeu_pd(c1 + j, _mm256_add_pd(load_or_zero(c1 + j, accumulate), r1));
      _mm256_storeu_pd(c2 + j, _mm256_add_pd(load_or_zero(c2 + j, accumulate), r2));
      _mm256_storeu_pd(c3 + j, _mm256_add_pd(load_or_zero(c3 + j, accumulate), r3));
    }
    for (; j < n; ++j) {
      double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
      for (int p = 0; p < k; ++p) {
        const double bv = b[static_cast<long>(p) * ldb + j];
        s0 += a0[p] * bv;
        s1 += a1[p] * bv;
        s2 += a2[p] * bv;
        s3 += a3[p] * bv;
      }
      c0[j] = accumulate ? c0[j] + s0 : s0;
      c1[j] = accumulate ? c1[j] + s1 : s1;
      c2[j] = accumulate ? c2[j] + s2 : s2;
      c3[j] = accumulate ? c3[j] + s3 : s3;
    }
  }
  for (; i < m; ++i) {
    const double* ar = a + static_cast<long>(i) * lda;
    double* cr = c + static_cast<long>(i) * ldc;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d r0 = _mm256_setzero_pd(), r1 = _mm256_setzero_pd();
      const double* bp = b + j;
      for (int p = 0; p < k; ++p, bp += ldb) {
        const __m256d av = _mm256_broadcast_sd(ar + p);
        r0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(bp), r0);
        r1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(bp + 4), r1);
      }
      _mm256_storeu_pd(cr + j, _mm256_add_pd(load_or_zero(cr + j, accumulate), r0));
      _mm256_storeu_pd(cr + j + 4, _mm256_add_pd(load_or_zero(cr + j + 4, accumulate), r1));
    }
    for (; j + 4 <= n; j += 4) {
      __m256d r0 = _mm256_setzero_pd();
      const double* bp = b + j;
      for (int p = 0; p < k; ++p, bp += ldb) {
        r0 = _mm256_fmadd_pd(_mm256_broadcast_sd(ar + p), _mm256_loadu_pd(bp), r0);
      }
      _mm256_storeu_pd(cr + j, _mm256_add_pd(load_or_zero(cr + j, accumulate), r0));
    }
    for (; j < n; ++j) {
      double s = 0;
      for (int p = 0; p < k; ++p) s += ar[p] * b[static_cast<long>(p) * ldb + j];
      cr[j] = accumulate ? cr[j] + s : s;
    }
  }
}

std::vector<double>& scratch() {
  thread_local std::vector<double> buf;
  return buf;
}

// src is rows x cols with leading dim ld; dst becomes cols x rows (dense).
void transpose_into(const double* src, int rows, int cols, int ld, std::vector<double>& dst) {
  dst.resize(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    const double* s = src + static_cast<long>(r) * ld;
    for (int c = 0; c < cols; ++c) dst[static_cast<std::size_t>(c) * rows + r] = s[c];
  }
}

void gemm_nt(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
             int ldc, bool accumulate) {
  auto& bt = scratch();
  transpose_into(b, n, k, ldb, bt);
  gemm_nn(m, n, k, a, lda, bt.data(), n, c, ldc, accumulate);
}

void gemm_tn(int m, int n, int k, const double* a, int lda, const double* b, int ldb, double* c,
             int ldc, bool accumulate) {
  auto& at = scratch();
  transpose_into(a, k, m, lda, at);
  gemm_nn(m, n, k, at.data(), k, b, ldb, c, ldc, accumulate);
}

double dot(const double* x, const double* y, int n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(int n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance(const double* x, const double* y, int n) {
  __m256d s0 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    s0 = _mm256_fmadd_pd(d, d, s0);
  }
  double s = hsum(s0);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void softmax(double* row, int n) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  __m256d mv = _mm256_set1_pd(kNegInf);
  int i = 0;
  for (; i + 4 <= n; i += 4) mv = _mm256_max_pd(mv, _mm256_loadu_pd(row + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, mv);
  double mx = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) mx = row[i] > mx ? row[i] : mx;
  if (mx == kNegInf) {
    for (int j = 0; j < n; ++j) row[j] = 0.0;
    return;
  }
  for (int j = 0; j < n; ++j) row[j] = std::exp(row[j] - mx);
  __m256d sv = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4) sv = _mm256_add_pd(sv, _mm256_loadu_pd(row + i));
  double sum = hsum(sv);
  for (; i < n; ++i) sum += row[i];
  const __m256d inv = _mm256_set1_pd(1.0 / sum);
  i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(row + i, _mm256_mul_pd(_mm256_loadu_pd(row + i), inv));
  const double invs = 1.0 / sum;
  for (; i < n; ++i) row[i] *= invs;
}

double layer_norm(const double* x, const double* gamma, const double* beta, int n, double eps,
                  double* xhat, double* y) {
  __m256d sv = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) sv = _mm256_add_pd(sv, _mm256_loadu_pd(x + i));
  double mean = hsum(sv);
  for (; i < n; ++i) mean += x[i];
  mean /= n;
  const __m256d meanv = _mm256_set1_pd(mean);
  __m256d vv = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), meanv);
    vv = _mm256_fmadd_pd(d, d, vv);
  }
  double var = hsum(vv);
  for (; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
  var /= n;
  const double rstd = 1.0 / std::sqrt(var + eps);
  const __m256d rv = _mm256_set1_pd(rstd);
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xh = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), meanv), rv);
    _mm256_storeu_pd(xhat + i, xh);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(_mm256_loadu_pd(gamma + i), xh, _mm256_loadu_pd(beta + i)));
  }
  for (; i < n; ++i) {
    xhat[i] = (x[i] - mean) * rstd;
    y[i] = gamma[i] * xhat[i] + beta[i];
  }
  return rstd;
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", gemm_nn, gemm_nt, gemm_tn, dot,
                                 axpy,   squared_distance, softmax, layer_norm};
  return table;
}

}  // namespace violet::kernels
