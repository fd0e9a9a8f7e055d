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
#include <numbers>
#include <random>

#include "orthoadd/rademacher.hpp"
#include "oracles/oracles.hpp"

namespace orthoadd {
namespace {

TEST(CycloScalar, ClosedUnderMultiplication) {
  const CycloScalar a(5, 3), b(5, 4);
  EXPECT_EQ((a * b).exponent(), 2);
  EXPECT_EQ(a.pow(5), CycloScalar::one(5));
  EXPECT_EQ(a * a.conj(), CycloScalar::one(5));
  EXPECT_TRUE((a * CycloScalar::zero(5)).is_zero());
  EXPECT_EQ(CycloScalar(4, -1).exponent(), 3);
  EXPECT_THROW(CycloScalar(3, 1) * CycloScalar(4, 1), InvalidArgument);
}

TEST(CycloScalar, ValuesAreRootsOfUnity) {
  EXPECT_EQ(CycloScalar(4, 1).value(), Scalar(0.0, 1.0));
  EXPECT_EQ(CycloScalar(2, 1).value(), Scalar(-1.0, 0.0));
  const Scalar w = CycloScalar(3, 1).value();
  EXPECT_NEAR(w.real(), -0.5, 1e-15);
  EXPECT_NEAR(w.imag(), std::sqrt(3.0) / 2, 1e-15);
  EXPECT_EQ(CycloScalar::zero(3).value(), Scalar(0.0, 0.0));
}

TEST(Cyclotomic, KnownPolynomials) {
  using P = std::vector<std::int64_t>;
  EXPECT_EQ(cyclotomic_polynomial(1), (P{-1, 1}));
  EXPECT_EQ(cyclotomic_polynomial(2), (P{1, 1}));
  EXPECT_EQ(cyclotomic_polynomial(4), (P{1, 0, 1}));
  EXPECT_EQ(cyclotomic_polynomial(6), (P{1, -1, 1}));
  EXPECT_EQ(cyclotomic_polynomial(12), (P{1, 0, -1, 0, 1}));
  // Phi_105 is the first with a coefficient of modulus 2.
  const auto p105 = cyclotomic_polynomial(105);
  EXPECT_EQ(p105.size(), 49u);
  EXPECT_EQ(*std::min_element(p105.begin(), p105.end()), -2);
}

TEST(CycloAverage, ExactZeroDetection) {
  // k = 4: 1 + i - 1 - i = 0 but counts are not all equal in a naive sense
  EXPECT_TRUE(CycloAverage(4, {1, 1, 1, 1}, 4).is_zero());
  EXPECT_TRUE(CycloAverage(4, {2, 0, 2, 0}, 4).is_zero());
  EXPECT_FALSE(CycloAverage(4, {2, 2, 0, 0}, 4).is_zero());
  // k = 6: omega^0 + omega^2 + omega^4 = 0
  EXPECT_TRUE(CycloAverage(6, {1, 0, 1, 0, 1, 0}, 3).is_zero());
  EXPECT_TRUE(CycloAverage(3, {5, 0, 0}, 5).equals(1));
  EXPECT_FALSE(CycloAverage(3, {5, 0, 0}, 5).equals(0));
}

TEST(GeneralizedRademacher, EvalExamples) {
  EXPECT_EQ(GeneralizedRademacher(2, 1).eval(0.3).exponent(), 0);
  EXPECT_EQ(GeneralizedRademacher(2, 2).eval(0.6).exponent(), 0);
  EXPECT_EQ(GeneralizedRademacher(3, 1).eval(0.5).exponent(), 1);
  EXPECT_THROW(GeneralizedRademacher(2, 1).eval(1.5), InvalidArgument);
  EXPECT_THROW(GeneralizedRademacher(2, 1).eval(-0.1), InvalidArgument);
  EXPECT_THROW(GeneralizedRademacher(1, 1), InvalidArgument);
  EXPECT_THROW(GeneralizedRademacher(2, 0), InvalidArgument);
}

TEST(GeneralizedRademacher, BreakpointsTakeRightInterval) {
  const GeneralizedRademacher r(3, 2);
  // t = m / 9 lies in piece m
  for (std::uint64_t m = 0; m < 9; ++m) {
    EXPECT_EQ(r.eval(m, 9).exponent(), static_cast<int>(m % 3)) << m;
  }
  EXPECT_EQ(r.eval(1, 1).exponent(), 2);   // t = 1 joins the last piece
  EXPECT_EQ(r.eval(1, 3).exponent(), 0);   // 3/9 = 1/3
  EXPECT_EQ(r.eval(2, 3).exponent(), 0);
  EXPECT_EQ(r.eval(1.0).exponent(), 2);
  EXPECT_THROW(r.eval(4, 3), InvalidArgument);
}

TEST(GeneralizedRademacher, DigitRuleMatchesRecursiveConstruction) {
  for (int k = 2; k <= 5; ++k) {
    for (int n = 1; n <= 4; ++n) {
      const GeneralizedRademacher r(k, n);
      for (int i = 0; i < 10000; ++i) {
        const double t = (i + 0.37) / 10000.0;
        ASSERT_EQ(r.eval(t).exponent(), oracle::rademacher_recursive(k, n, t))
            << "k=" << k << " n=" << n << " t=" << t;
      }
    }
  }
}

TEST(GeneralizedRademacher, UnitModulusEverywhere) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 2; k <= 6; ++k) {
    for (int n = 1; n <= 5; ++n) {
      const GeneralizedRademacher r(k, n);
      for (int i = 0; i < 1000; ++i) {
        const auto v = r.eval(u(rng));
        ASSERT_FALSE(v.is_zero());
        ASSERT_NEAR(std::abs(v.value()), 1.0, 1e-15);
      }
    }
  }
}

TEST(GeneralizedRademacher, ClassicalCaseIsSignOfSine) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 6; ++n) {
    const GeneralizedRademacher r(2, n);
    for (int i = 0; i < 2000; ++i) {
      const double t = u(rng);
      const double s = std::sin(std::ldexp(std::numbers::pi, n) * t);
      if (std::abs(s) < 1e-9) continue;  // too close to a breakpoint
      EXPECT_EQ(r.eval(t).value().real(), s > 0 ? 1.0 : -1.0);
    }
  }
}

TEST(IntegrateProduct, Examples) {
  EXPECT_EQ(integrate_product(std::vector{1, 1}, 2), 1);
  EXPECT_EQ(integrate_product(std::vector{1, 2}, 2), 0);
  EXPECT_EQ(integrate_product(std::vector{1, 1, 2, 2}, 4), 0);
  EXPECT_THROW(integrate_product(std::vector{1, 1, 1}, 2), InvalidArgument);
  EXPECT_THROW(integrate_product(std::vector{0, 1}, 2), InvalidArgument);
}

TEST(IntegrateProduct, MultiplicityRuleMatchesPiecewiseSum) {
  for (int k = 2; k <= 5; ++k) {
    std::vector<int> levels(k, 1);
    while (true) {
      const bool equal = std::all_of(levels.begin(), levels.end(),
                                     [&](int l) { return l == levels[0]; });
      const int rule = integrate_product(levels, k);
      ASSERT_EQ(rule, equal ? 1 : 0);
      ASSERT_TRUE(integrate_product_piecewise(levels, k).equals(rule));
      int j = k - 1;
      while (j >= 0 && ++levels[j] > 4) levels[j--] = 1;
      if (j < 0) break;
    }
  }
}

TEST(IntegrateStepProduct, Examples) {
  const std::vector<StepFactor> single = {{1, CycloScalar::one(2)}};
  EXPECT_TRUE(integrate_step_product(single, 2, 1).is_zero());

  const std::vector<StepFactor> square = {{1, CycloScalar::one(2)},
                                          {1, CycloScalar::one(2)}};
  EXPECT_TRUE(integrate_step_product(square, 2, 1).equals(1));

  const std::vector<StepFactor> three = {{1, CycloScalar::one(3)},
                                         {2, CycloScalar::one(3)},
                                         {2, CycloScalar::one(3)}};
  const auto avg = integrate_step_product(three, 3, 2);
  EXPECT_TRUE(avg.is_zero());
  EXPECT_NEAR(std::abs(avg.value()), 0.0, 1e-15);
}

TEST(IntegrateStepProduct, CoefficientsScaleTheResult) {
  // omega * r_1^3 integrates to omega for k = 3.
  const CycloScalar w(3, 1);
  const std::vector<StepFactor> f = {{1, w}, {1, CycloScalar::one(3)},
                                     {1, CycloScalar::one(3)}};
  const auto avg = integrate_step_product(f, 3, 2);
  EXPECT_FALSE(avg.equals(1));
  EXPECT_NEAR(std::abs(avg.value() - w.value()), 0.0, 1e-15);
}

TEST(IntegrateStepProduct, Errors) {
  const std::vector<StepFactor> f = {{3, CycloScalar::one(2)}};
  EXPECT_THROW(integrate_step_product(f, 2, 2), InvalidArgument);
  EXPECT_THROW(integrate_step_product(f, 10, 7), InvalidArgument);  // order
  const std::vector<StepFactor> g = {{3, CycloScalar::one(10)}};
  EXPECT_THROW(integrate_step_product(g, 10, 7), BudgetExceeded);
}

}  // namespace
}  // namespace orthoadd
