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

/// \file
/// Diagonal tensors u = sum_i a_i e_i (x) ... (x) e_i in the k-fold symmetric
/// projective tensor product of l_p.
///
/// The projective norm of such a tensor is ||a||_{p/k} when k < p and ||a||_1
/// when p <= k. Besides the closed form this header computes a certified
/// upper bound (from an explicit rank-one decomposition obtained by
/// Rademacher averaging) and a certified lower bound (from a diagonal
/// k-linear form and its Holder bound). Both are tight.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "orthoadd/numerics.hpp"
#include "orthoadd/rademacher.hpp"

namespace orthoadd {

/// Maximum number of coefficients in a dense n^k expansion.
inline constexpr std::uint64_t kMaxDenseCoefficients = 100'000;

class DiagonalTensor {
 public:
  DiagonalTensor(Vector coeffs, LpParams params)
      : coeffs_(std::move(coeffs)), params_(params) {
    if (params_.k() < 2) {
      throw InvalidArgument("DiagonalTensor: degree k must be >= 2");
    }
    require_finite(coeffs_, "DiagonalTensor");
  }

  const Vector& coeffs() const { return coeffs_; }
  const LpParams& params() const { return params_; }
  std::size_t dim() const { return coeffs_.size(); }
  int degree() const { return params_.k(); }

  DiagonalTensor scaled(const Scalar& lambda) const {
    Vector c = coeffs_;
    for (auto& z : c) z *= lambda;
    return DiagonalTensor(std::move(c), params_);
  }

 private:
  Vector coeffs_;
  LpParams params_;
};

/// weight * slots[0] (x) ... (x) slots[k-1].
struct RankOneTerm {
  double weight = 0.0;
  std::vector<Vector> slots;
};

/// B(x_1, ..., x_k) = sum_i b_i x_{1,i} ... x_{k,i}.
class DualDiagonalForm {
 public:
  DualDiagonalForm(Vector b, LpParams params)
      : b_(std::move(b)), params_(params) {
    require_finite(b_, "DualDiagonalForm");
  }

  const Vector& coeffs() const { return b_; }
  const LpParams& params() const { return params_; }
  std::size_t dim() const { return b_.size(); }

  Scalar operator()(std::span<const Vector> xs) const {
    if (xs.size() != static_cast<std::size_t>(params_.k())) {
      throw InvalidArgument("DualDiagonalForm: expected k arguments");
    }
    Scalar s{0.0, 0.0};
    for (std::size_t i = 0; i < b_.size(); ++i) {
      Scalar t = b_[i];
      for (const auto& x : xs) {
        if (x.size() != b_.size()) {
          throw InvalidArgument("DualDiagonalForm: dimension mismatch");
        }
        t *= x[i];
      }
      s += t;
    }
    return s;
  }

  /// Generalized Holder bound ||B|| <= ||b||_{p/(p-k)} (l_inf when p <= k),
  /// valid for all x_j in the unit ball of l_p.
  double norm_bound() const {
    return lq_norm(b_, conjugate_exponent(params_));
  }

 private:
  Vector b_;
  LpParams params_;
};

namespace detail {

/// Slot entries of the averaging decomposition before the root of unity is
/// applied: first slot and the remaining slots.
struct AveragingFactors {
  Vector first;
  Vector rest;
};

inline AveragingFactors averaging_factors(const DiagonalTensor& u,
                                          bool symmetric) {
  const int k = u.degree();
  AveragingFactors f;
  f.first.reserve(u.dim());
  f.rest.reserve(u.dim());
  for (const auto& a : u.coeffs()) {
    const double m = std::pow(std::abs(a), 1.0 / k);
    if (symmetric) {
      const Scalar s = phase_root(a, k) * m;
      f.first.push_back(s);
      f.rest.push_back(s);
    } else {
      f.first.push_back(phase(a) * m);
      f.rest.emplace_back(m, 0.0);
    }
  }
  return f;
}

}  // namespace detail

/// Visits each rank-one term of the Rademacher-averaging decomposition of u.
/// There are k^n terms of weight 1/k^n; term m evaluates the integrand on the
/// m-th constancy piece, where r_i takes the value omega^(digit i of m).
///
/// symmetric = true puts phase_root(a_i, k) |a_i|^(1/k) in every slot;
/// symmetric = false puts phase(a_i) |a_i|^(1/k) in slot 0 and |a_i|^(1/k) in
/// the others.
inline void for_each_averaging_term(
    const DiagonalTensor& u, bool symmetric,
    const std::function<void(const RankOneTerm&)>& visit) {
  const int k = u.degree();
  const int n = static_cast<int>(u.dim());
  const std::uint64_t pieces = checked_power(
      static_cast<std::uint64_t>(k), n, kMaxPieces, "averaging_decomposition");
  const auto f = detail::averaging_factors(u, symmetric);
  const double weight = 1.0 / static_cast<double>(pieces);

  std::vector<Scalar> roots(static_cast<std::size_t>(k));
  for (int e = 0; e < k; ++e) roots[e] = root_of_unity(k, e);

  RankOneTerm term;
  term.weight = weight;
  term.slots.assign(static_cast<std::size_t>(k), Vector(u.dim()));
  std::vector<int> digit(u.dim(), 0);
  for (std::uint64_t m = 0; m < pieces; ++m) {
    // Level i (1-based) reads base-k digit n - i of m, most significant first.
    std::uint64_t q = m;
    for (int i = n - 1; i >= 0; --i) {
      digit[i] = static_cast<int>(q % static_cast<std::uint64_t>(k));
      q /= static_cast<std::uint64_t>(k);
    }
    for (std::size_t i = 0; i < u.dim(); ++i) {
      const Scalar r = roots[digit[i]];
      term.slots[0][i] = f.first[i] * r;
      for (int j = 1; j < k; ++j) term.slots[j][i] = f.rest[i] * r;
    }
    visit(term);
  }
}

inline std::vector<RankOneTerm> averaging_decomposition(const DiagonalTensor& u,
                                                        bool symmetric = true) {
  std::vector<RankOneTerm> terms;
  for_each_averaging_term(u, symmetric,
                          [&](const RankOneTerm& t) { terms.push_back(t); });
  return terms;
}

/// Dense coefficients of sum_t weight_t v_{t,1} (x) ... (x) v_{t,k}, indexed
/// row-major by (i_1, ..., i_k) with i_1 most significant.
inline Vector dense_expansion(std::span<const RankOneTerm> terms, std::size_t n,
                              int k) {
  const std::uint64_t size = checked_power(n, k, kMaxDenseCoefficients,
                                           "dense_expansion");
  Vector dense(size, Scalar{0.0, 0.0});
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  for (const auto& t : terms) {
    if (t.slots.size() != static_cast<std::size_t>(k)) {
      throw InvalidArgument("dense_expansion: term has wrong number of slots");
    }
    for (std::uint64_t flat = 0; flat < size; ++flat) {
      std::uint64_t q = flat;
      for (int j = k - 1; j >= 0; --j) {
        idx[j] = q % n;
        q /= n;
      }
      Scalar prod = t.weight;
      for (int j = 0; j < k; ++j) prod *= t.slots[j][idx[j]];
      dense[flat] += prod;
    }
  }
  return dense;
}

/// pi(u): ||a||_{p/k} for k < p, ||a||_1 for p <= k.
inline double pi_norm_closed_form(const DiagonalTensor& u) {
  const auto& prm = u.params();
  if (prm.regime() == Regime::large_p) {
    return lq_norm(u.coeffs(), prm.p() / prm.k());
  }
  return lq_norm(u.coeffs(), 1.0);
}

/// Upper bound on pi(u) from explicit rank-one decompositions, using
/// pi(v_1 (x) ... (x) v_k) <= prod_j ||v_j||_p.
///
/// Evaluates the Rademacher-averaging decomposition; for p <= k the basis
/// decomposition sum_i a_i e_i (x) ... (x) e_i is better and the smaller of
/// the two is returned.
inline double pi_upper_bound(const DiagonalTensor& u, bool symmetric = true) {
  const double p = u.params().p();
  double averaged = 0.0;
  for_each_averaging_term(u, symmetric, [&](const RankOneTerm& t) {
    double prod = t.weight;
    for (const auto& v : t.slots) prod *= lq_norm(v, p);
    averaged += prod;
  });
  if (u.params().regime() == Regime::large_p) return averaged;
  std::vector<double> basis;
  basis.reserve(u.dim());
  for (const auto& a : u.coeffs()) basis.push_back(std::abs(a));
  return std::min(averaged, ordered_sum(std::move(basis)));
}

/// The norming form: b_i = conj(phase(a_i)) |a_i|^(p/k - 1) for k < p and
/// b_i = conj(phase(a_i)) for p <= k, so that <u, B> is real and nonnegative.
inline DualDiagonalForm build_dual_form(const DiagonalTensor& u) {
  const auto& prm = u.params();
  Vector b;
  b.reserve(u.dim());
  for (const auto& a : u.coeffs()) {
    const Scalar s = std::conj(phase(a));
    if (prm.regime() == Regime::large_p) {
      b.push_back(s * std::pow(std::abs(a), prm.p() / prm.k() - 1.0));
    } else {
      b.push_back(s);
    }
  }
  return DualDiagonalForm(std::move(b), prm);
}

/// <u, B> = sum_i a_i b_i; B(e_i, ..., e_i) = b_i and the off-diagonal basis
/// tensors do not occur in u.
inline Scalar pair(const DiagonalTensor& u, const DualDiagonalForm& form) {
  if (u.dim() != form.dim()) {
    throw InvalidArgument("pair: dimension mismatch (" +
                          std::to_string(u.dim()) + " vs " +
                          std::to_string(form.dim()) + ")");
  }
  Vector terms(u.dim());
  for (std::size_t i = 0; i < u.dim(); ++i) {
    terms[i] = u.coeffs()[i] * form.coeffs()[i];
  }
  return ordered_sum(std::move(terms));
}

/// Lower bound |<u, B>| / ||B||_bound on pi(u).
inline double pi_lower_bound(const DiagonalTensor& u) {
  const auto form = build_dual_form(u);
  const double pairing = std::abs(pair(u, form));
  if (pairing == 0.0) return 0.0;
  return pairing / form.norm_bound();
}

}  // namespace orthoadd
