// Copyright (C) 2026 The violet-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "violet/core/kernels.hpp"
#include "violet/core/random.hpp"

using namespace violet;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], b[i], tol * (1.0 + std::abs(b[i]))) << "index " << i;
  }
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = kernels::avx2_table();
    if (simd_ == nullptr) GTEST_SKIP() << "no AVX2 kernels on this machine";
  }
  const kernels::KernelTable* simd_ = nullptr;
  const kernels::KernelTable& ref_ = kernels::scalar_table();
};

}  // namespace

TEST_F(KernelEquivalence, GemmVariantsMatchScalarOnOddShapes) {
  Rng rng(1);
  const int shapes[][3] = {{1, 1, 1}, {3, 5, 7}, {4, 8, 16}, {9, 13, 5}, {17, 33, 12}, {64, 48, 32}, {5, 3, 0}};
  for (const auto& s : shapes) {
    const int m = s[0], n = s[1], k = s[2];
    for (bool acc : {false, true}) {
      auto a = random_vec(rng, static_cast<std::size_t>(m) * k);
      auto b = random_vec(rng, static_cast<std::size_t>(k) * n);
      auto c0 = random_vec(rng, static_cast<std::size_t>(m) * n);
      auto c1 = c0;
      ref_.gemm_nn(m, n, k, a.data(), k, b.data(), n, c0.data(), n, acc);
      simd_->gemm_nn(m, n, k, a.data(), k, b.data(), n, c1.data(), n, acc);
      expect_close(c1, c0, 1e-12);

      auto bt = random_vec(rng, static_cast<std::size_t>(n) * k);
      c1 = c0;
      auto c2 = c0;
      ref_.gemm_nt(m, n, k, a.data(), k, bt.data(), k, c1.data(), n, acc);
      simd_->gemm_nt(m, n, k, a.data(), k, bt.data(), k, c2.data(), n, acc);
      expect_close(c2, c1, 1e-12);

      auto at = random_vec(rng, static_cast<std::size_t>(k) * m);
      c1 = c0;
      c2 = c0;
      ref_.gemm_tn(m, n, k, at.data(), m, b.data(), n, c1.data(), n, acc);
      simd_->gemm_tn(m, n, k, at.data(), m, b.data(), n, c2.data(), n, acc);
      expect_close(c2, c1, 1e-12);
    }
  }
}

TEST_F(KernelEquivalence, GemmRespectsLeadingDimensions) {
  Rng rng(2);
  const int m = 5, n = 6, k = 7, lda = 11, ldb = 9, ldc = 10;
  auto a = random_vec(rng, static_cast<std::size_t>(m) * lda);
  auto b = random_vec(rng, static_cast<std::size_t>(k) * ldb);
  std::vector<double> c0(static_cast<std::size_t>(m) * ldc, 3.0), c1 = c0;
  ref_.gemm_nn(m, n, k, a.data(), lda, b.data(), ldb, c0.data(), ldc, false);
  simd_->gemm_nn(m, n, k, a.data(), lda, b.data(), ldb, c1.data(), ldc, false);
  expect_close(c1, c0, 1e-12);
  // padding columns untouched
  for (int i = 0; i < m; ++i)
    for (int j = n; j < ldc; ++j) EXPECT_EQ(c1[i * ldc + j], 3.0);
}

TEST_F(KernelEquivalence, VectorKernelsMatchScalar) {
  Rng rng(3);
  for (int n : {1, 3, 4, 7, 8, 15, 16, 33, 128}) {
    auto x = random_vec(rng, n), y = random_vec(rng, n);
    EXPECT_NEAR(simd_->dot(x.data(), y.data(), n), ref_.dot(x.data(), y.data(), n), 1e-12 * n);
    EXPECT_NEAR(simd_->squared_distance(x.data(), y.data(), n),
                ref_.squared_distance(x.data(), y.data(), n), 1e-12 * n);
    auto y0 = y, y1 = y;
    ref_.axpy(n, 0.37, x.data(), y0.data());
    simd_->axpy(n, 0.37, x.data(), y1.data());
    expect_close(y1, y0, 1e-14);

    auto s0 = x, s1 = x;
    if (n > 2) s0[1] = s1[1] = -std::numeric_limits<double>::infinity();
    ref_.softmax(s0.data(), n);
    simd_->softmax(s1.data(), n);
    expect_close(s1, s0, 1e-13);

    auto gamma = random_vec(rng, n), beta = random_vec(rng, n);
    std::vector<double> xh0(n), xh1(n), o0(n), o1(n);
    const double r0 = ref_.layer_norm(x.data(), gamma.data(), beta.data(), n, 1e-5, xh0.data(), o0.data());
    const double r1 = simd_->layer_norm(x.data(), gamma.data(), beta.data(), n, 1e-5, xh1.data(), o1.data());
    EXPECT_NEAR(r0, r1, 1e-12 * std::abs(r0));
    expect_close(o1, o0, 1e-12);
  }
}

TEST(ScalarKernels, SoftmaxOfAllMaskedRowIsZero) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> row{-inf, -inf, -inf};
  kernels::scalar_table().softmax(row.data(), 3);
  for (double v : row) EXPECT_EQ(v, 0.0);
}

TEST(ScalarKernels, GemmAgainstHandComputedProduct) {
  // [1 2; 3 4] * [5 6; 7 8] = [19 22; 43 50]
  const double a[] = {1, 2, 3, 4}, b[] = {5, 6, 7, 8};
  double c[4] = {};
  kernels::scalar_table().gemm_nn(2, 2, 2, a, 2, b, 2, c, 2, false);
  EXPECT_EQ(c[0], 19);
  EXPECT_EQ(c[1], 22);
  EXPECT_EQ(c[2], 43);
  EXPECT_EQ(c[3], 50);
}

TEST(KernelDispatch, UseSwitchesActiveTable) {
  kernels::use("scalar");
  EXPECT_STREQ(kernels::active().name, "scalar");
  kernels::use("auto");
  if (kernels::avx2_table() != nullptr) {
    EXPECT_STREQ(kernels::active().name, "avx2");
  }
  EXPECT_THROW(kernels::use("sse9"), std::exception);
}
