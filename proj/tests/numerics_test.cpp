// Copyright 2026 The orthoadd Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "orthoadd/numerics.hpp"
#include "oracles/oracles.hpp"

namespace orthoadd {
namespace {

TEST(LqNorm, Examples) {
  EXPECT_EQ(lq_norm(Vector{1.0, 0.0, 0.0}, 2.0), 1.0);
  EXPECT_NEAR(lq_norm(Vector{1.0, 1.0}, 2.0), oracle::sqrt_binary_expansion(2.0),
              1e-15);
  EXPECT_NEAR(lq_norm(Vector{1.0, 1.0}, 2.0), 1.4142135623730951, 1e-15);
  EXPECT_EQ(lq_norm(Vector{3.0, -4.0}, kInfinity), 4.0);
  EXPECT_EQ(lq_norm(Vector{}, 3.0), 0.0);
  EXPECT_EQ(lq_norm(Vector{0.0, 0.0}, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(lq_norm(Vector{Scalar(3.0, 4.0)}, 7.0), 5.0);
}

TEST(LqNorm, RejectsSubunitExponentAndNonFinite) {
  EXPECT_THROW(lq_norm(Vector{1.0}, 0.5), InvalidArgument);
  EXPECT_THROW(lq_norm(Vector{1.0}, std::nan("")), InvalidArgument);
  EXPECT_THROW(lq_norm(Vector{Scalar(std::nan(""), 0.0)}, 2.0), InvalidArgument);
  EXPECT_THROW(lq_norm(Vector{Scalar(0.0, INFINITY)}, 2.0), InvalidArgument);
}

TEST(LqNorm, NoOverflowForLargeEntries) {
  EXPECT_DOUBLE_EQ(lq_norm(Vector{1e200, 1e200}, 2.0), std::sqrt(2.0) * 1e200);
}

TEST(PhaseRoot, Examples) {
  EXPECT_EQ(phase_root(1.0, 3), Scalar(1.0, 0.0));
  EXPECT_EQ(phase_root(-1.0, 2), Scalar(0.0, 1.0));
  const Scalar s = phase_root(-8.0, 2);
  EXPECT_EQ(s, Scalar(0.0, 1.0));
  // modulus reconstruction: (s |a|^{1/2})^2 = a
  const Scalar r = ipow(s * std::sqrt(8.0), 2);
  EXPECT_NEAR(std::abs(r - Scalar(-8.0)), 0.0, 1e-14);
  EXPECT_EQ(phase_root(0.0, 5), Scalar(1.0, 0.0));
  EXPECT_THROW(phase_root(Scalar(INFINITY, 0.0), 2), InvalidArgument);
  EXPECT_THROW(phase_root(1.0, 0), InvalidArgument);
}

TEST(PhaseRoot, ReconstructsRandomComplex) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int t = 0; t < 2000; ++t) {
    const Scalar a(g(rng), g(rng));
    for (int k = 1; k <= 6; ++k) {
      const Scalar s = phase_root(a, k);
      EXPECT_NEAR(std::abs(s), 1.0, 1e-15);
      const Scalar back = ipow(s * std::pow(std::abs(a), 1.0 / k), k);
      EXPECT_LE(std::abs(back - a), 1e-12 * std::abs(a));
    }
  }
}

TEST(ConjugateExponent, Examples) {
  EXPECT_EQ(conjugate_exponent(4.0, 2), 2.0);
  EXPECT_TRUE(std::isinf(conjugate_exponent(2.0, 2)));
  EXPECT_EQ(conjugate_exponent(6.0, 3), 2.0);
  EXPECT_TRUE(std::isinf(conjugate_exponent(1.0, 3)));
  EXPECT_THROW(conjugate_exponent(0.5, 2), InvalidArgument);
}

TEST(LpParams, InvariantsAndRegime) {
  EXPECT_THROW(LpParams(0.99, 2), InvalidArgument);
  EXPECT_THROW(LpParams(INFINITY, 2), InvalidArgument);
  EXPECT_THROW(LpParams(2.0, 0), InvalidArgument);
  EXPECT_EQ(LpParams(2.0, 2).regime(), Regime::small_p);
  EXPECT_EQ(LpParams(2.5, 2).regime(), Regime::large_p);
  EXPECT_EQ(LpParams(1.0, 3).regime(), Regime::small_p);
}

// Hölder pairing, homogeneity and l_p monotonicity on random vectors.
TEST(LqNormProperties, HolderHomogeneityMonotonicity) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> uq(1.0, 8.0);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int t = 0; t < 3000; ++t) {
    const int n = dim(rng);
    Vector v(n), w(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    for (auto& z : w) z = {g(rng), g(rng)};
    const double q = t % 10 == 0 ? 1.0 : uq(rng);
    const double qc = holder_conjugate(q);
    Scalar dot = 0.0;
    for (int i = 0; i < n; ++i) dot += v[i] * w[i];
    const double bound = lq_norm(v, q) * lq_norm(w, qc);
    EXPECT_LE(std::abs(dot), bound * (1.0 + 1e-12));

    const Scalar lambda(g(rng), g(rng));
    Vector lv = v;
    for (auto& z : lv) z *= lambda;
    EXPECT_NEAR(lq_norm(lv, q), std::abs(lambda) * lq_norm(v, q),
                1e-15 * std::abs(lambda) * lq_norm(v, q));

    // ||x||_k <= ||x||_p for p <= k
    const double p = uq(rng);
    const double kk = p + uq(rng);
    EXPECT_LE(lq_norm(v, kk), lq_norm(v, p) * (1.0 + 1e-14));
  }
}

TEST(LqNormProperties, PermutationInvariantBitForBit) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    Vector v(9);
    for (auto& z : v) z = {g(rng), g(rng)};
    const double ref = lq_norm(v, 2.5);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_EQ(lq_norm(v, 2.5), ref);
  }
}

}  // namespace
}  // namespace orthoadd
