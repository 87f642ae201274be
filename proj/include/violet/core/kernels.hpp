// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace violet::kernels {

// Dense inner loops. Every kernel has a portable scalar reference and, on
// x86-64, an AVX2+FMA variant. The active table is picked once at startup from
// the CPU features; VIOLET_KERNELS=scalar|avx2 overrides the choice.
//
// All matrices are row-major with explicit leading dimensions. When
// `accumulate` is false the output is overwritten, otherwise added to.
struct KernelTable {
  const char* name;

  // C[m,n] (+)= A[m,k] * B[k,n]
  void (*gemm_nn)(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc, bool accumulate);
  // C[m,n] (+)= A[m,k] * B[n,k]^T
  void (*gemm_nt)(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc, bool accumulate);
  // C[m,n] (+)= A[k,m]^T * B[k,n]
  void (*gemm_tn)(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                  double* c, int ldc, bool accumulate);

  double (*dot)(const double* x, const double* y, int n);
  // y += alpha * x
  void (*axpy)(int n, double alpha, const double* x, double* y);
  double (*squared_distance)(const double* x, const double* y, int n);
  // In-place softmax; -inf entries get probability 0. A row that is entirely
  // -inf becomes all zeros.
  void (*softmax)(double* row, int n);
  // y = gamma * xhat + beta with xhat = (x - mean) * rstd. Returns rstd.
  double (*layer_norm)(const double* x, const double* gamma, const double* beta, int n,
                       double eps, double* xhat, double* y);
};

const KernelTable& scalar_table();
/// Null when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

const KernelTable& active();
/// Switches the process-wide table. Accepts "scalar", "avx2" or "auto".
void use(std::string_view name);

}  // namespace violet::kernels
