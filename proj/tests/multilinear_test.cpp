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

#include <random>

#include "orthoadd/experiment.hpp"
#include "orthoadd/multilinear.hpp"
#include "oracles/oracles.hpp"

namespace orthoadd {
namespace {

oracle::RealForm as_real(const MultilinearForm& phi) {
  oracle::RealForm f{phi.dim(), phi.degree(), {}};
  for (const auto& c : phi.coeffs()) f.coeffs.push_back(c.real());
  return f;
}

TEST(MultilinearForm, IndexingAndEvaluation) {
  MultilinearForm phi(3, LpParams(4.0, 2));
  phi.set(std::vector<std::size_t>{0, 2}, 5.0);
  EXPECT_EQ(phi.flat_index(std::vector<std::size_t>{0, 2}), 2u);
  EXPECT_EQ(phi.multi_index(7), (std::vector<std::size_t>{2, 1}));
  EXPECT_FALSE(phi.is_symmetric());
  const std::vector<Vector> xs = {{1.0, 0.0, 0.0}, {0.0, 0.0, 2.0}};
  EXPECT_EQ(phi(xs), Scalar(10.0));
  const auto sym = phi.symmetrized();
  EXPECT_TRUE(sym.symmetric());
  EXPECT_TRUE(sym.is_symmetric());
  EXPECT_EQ(sym.at(std::vector<std::size_t>{2, 0}), Scalar(2.5));
  EXPECT_THROW(MultilinearForm(2, LpParams(4.0, 2), Vector{1.0, 2.0, 3.0, 4.0}, true),
               InvalidArgument);
  EXPECT_THROW(MultilinearForm(2, LpParams(4.0, 2), Vector{1.0}), InvalidArgument);
  EXPECT_THROW(phi(std::vector<Vector>{{1.0, 0.0, 0.0}}), InvalidArgument);
}

TEST(MultilinearForm, ContractionMatchesEvaluation) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  MultilinearForm phi(3, LpParams(5.0, 3));
  Vector c(phi.size());
  for (auto& z : c) z = {g(rng), g(rng)};
  phi = MultilinearForm(3, LpParams(5.0, 3), c);
  std::vector<Vector> xs(3, Vector(3));
  for (auto& x : xs) {
    for (auto& z : x) z = {g(rng), g(rng)};
  }
  for (int slot = 0; slot < 3; ++slot) {
    const Vector gv = phi.contract_except(xs, slot);
    Scalar s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += gv[i] * xs[slot][i];
    EXPECT_NEAR(std::abs(s - phi(xs)), 0.0, 1e-12);
  }
}

TEST(HolderMaximizer, AttainsDualNorm) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double p : {1.0, 1.5, 2.0, 3.0, 7.0}) {
    Vector gv(5);
    for (auto& z : gv) z = {g(rng), g(rng)};
    const Vector y = holder_maximizer(gv, p, Field::complex);
    EXPECT_NEAR(lq_norm(y, p), 1.0, 1e-14);
    Scalar s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += gv[i] * y[i];
    EXPECT_NEAR(s.real(), lq_norm(gv, holder_conjugate(p)), 1e-12);
    EXPECT_NEAR(s.imag(), 0.0, 1e-12);
  }
}

TEST(EstimateFormNorm, DiagonalFormHasClosedNorm) {
  // ||sum b_i x_i y_i|| over l_4 balls is ||b||_2.
  MultilinearForm phi(2, LpParams(4.0, 2));
  phi.set_symmetric({0, 0}, 3.0);
  phi.set_symmetric({1, 1}, -4.0);
  const auto est = estimate_form_norm(phi, 10, 200, 1, Field::real);
  EXPECT_NEAR(est.value, 5.0, 1e-9);
  const auto cest = estimate_form_norm(phi, 10, 200, 1, Field::complex);
  EXPECT_NEAR(cest.value, 5.0, 1e-9);
}

TEST(EstimateFormNorm, AgreesWithGridSearch) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 8; ++t) {
    const int k = 2 + t % 2;
    const std::size_t n = 2 + (t / 2) % 2;
    const double p = k + 1.0 + 0.5 * (t % 3);
    const auto phi = experiment::random_symmetric_form(n, LpParams(p, k), rng);
    const double asc = estimate_form_norm(phi, 200, 500, t, Field::real).value;
    const double grid = oracle::grid_form_norm(as_real(phi), p);
    EXPECT_NEAR(asc, grid, 1e-4 * grid) << "k=" << k << " n=" << n;
  }
}

TEST(EstimateFormNorm, RealFieldRejectsComplexForm) {
  MultilinearForm phi(1, LpParams(3.0, 2), Vector{Scalar(0.0, 1.0)});
  EXPECT_THROW(estimate_form_norm(phi, 1, 1, 0, Field::real), InvalidArgument);
  EXPECT_THROW(estimate_form_norm(phi, 0, 1, 0), InvalidArgument);
}

}  // namespace
}  // namespace orthoadd
