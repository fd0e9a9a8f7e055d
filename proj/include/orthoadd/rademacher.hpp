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
/// Generalized k-Rademacher functions on [0,1].
///
/// For a fixed k >= 2 the level-n function r_n is constant on each k-adic
/// interval [m/k^n, (m+1)/k^n) and takes the value omega^d there, where
/// omega = exp(2 pi i / k) and d is the least significant base-k digit of m.
/// For k = 2 these are the classical Rademacher functions.
///
/// Products of r_n are integrated exactly: values are kept as exponents in
/// Z_k and sums of roots of unity are reduced modulo the k-th cyclotomic
/// polynomial, so no floating point value of omega is ever needed to decide
/// whether an integral is 0 or 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "orthoadd/numerics.hpp"

namespace orthoadd {

/// Maximum number of constancy pieces a piecewise summation may visit.
inline constexpr std::uint64_t kMaxPieces = 1'000'000;

/// k^e, or throws BudgetExceeded once the result exceeds `limit`.
inline std::uint64_t checked_power(std::uint64_t k, int e, std::uint64_t limit,
                                   const char* what) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > limit / k) {
      throw BudgetExceeded(std::string(what) + ": " + std::to_string(k) + "^" +
                           std::to_string(e) + " exceeds budget of " +
                           std::to_string(limit));
    }
    r *= k;
  }
  return r;
}

/// omega^e for omega = exp(2 pi i / k). Quarter turns are returned exactly.
inline Scalar root_of_unity(int k, int e) {
  e %= k;
  if (e < 0) e += k;
  if ((4 * e) % k == 0) {
    switch ((4 * e) / k) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * e / k);
}

/// A k-th root of unity omega^exponent, or the scalar zero.
class CycloScalar {
 public:
  CycloScalar(int k, int exponent) : k_(k), exponent_(reduce(exponent, k)) {
    if (k < 1) throw InvalidArgument("CycloScalar: k must be >= 1");
  }

  static CycloScalar one(int k) { return CycloScalar(k, 0); }

  static CycloScalar zero(int k) {
    CycloScalar z(k, 0);
    z.zero_ = true;
    return z;
  }

  int k() const { return k_; }
  int exponent() const { return exponent_; }
  bool is_zero() const { return zero_; }

  Scalar value() const {
    return zero_ ? Scalar{0.0, 0.0} : root_of_unity(k_, exponent_);
  }

  CycloScalar pow(int e) const {
    if (zero_) return e == 0 ? one(k_) : *this;
    return CycloScalar(k_, static_cast<int>(
                               (static_cast<std::int64_t>(exponent_) * e) % k_));
  }

  CycloScalar conj() const {
    return zero_ ? *this : CycloScalar(k_, k_ - exponent_);
  }

  friend CycloScalar operator*(const CycloScalar& a, const CycloScalar& b) {
    if (a.k_ != b.k_) {
      throw InvalidArgument("CycloScalar: mismatched orders " +
                            std::to_string(a.k_) + " and " +
                            std::to_string(b.k_));
    }
    if (a.zero_ || b.zero_) return zero(a.k_);
    return CycloScalar(a.k_, a.exponent_ + b.exponent_);
  }

  friend bool operator==(const CycloScalar& a, const CycloScalar& b) {
    if (a.k_ != b.k_ || a.zero_ != b.zero_) return false;
    return a.zero_ || a.exponent_ == b.exponent_;
  }

 private:
  static int reduce(int e, int k) {
    if (k < 1) return 0;
    e %= k;
    return e < 0 ? e + k : e;
  }

  int k_;
  int exponent_;
  bool zero_ = false;
};

namespace detail {

using IntPoly = std::vector<std::int64_t>;  // coefficient of x^i at index i

inline void trim(IntPoly& a) {
  while (a.size() > 1 && a.back() == 0) a.pop_back();
}

/// Remainder of a modulo the monic polynomial m.
inline IntPoly poly_mod(IntPoly a, const IntPoly& m) {
  const std::size_t dm = m.size() - 1;
  trim(a);
  while (a.size() > dm && !(a.size() == 1 && a[0] == 0)) {
    const std::int64_t lead = a.back();
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) a[shift + i] -= lead * m[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

/// Exact quotient a / m for monic m dividing a.
inline IntPoly poly_div_exact(IntPoly a, const IntPoly& m) {
  const std::size_t dm = m.size() - 1;
  IntPoly q(a.size() - dm, 0);
  for (std::size_t i = a.size(); i-- > dm;) {
    const std::int64_t c = a[i];
    q[i - dm] = c;
    for (std::size_t j = 0; j <= dm; ++j) a[i - dm + j] -= c * m[j];
  }
  return q;
}

}  // namespace detail

/// Integer coefficients of the k-th cyclotomic polynomial Phi_k, lowest
/// degree first.
inline std::vector<std::int64_t> cyclotomic_polynomial(int k) {
  if (k < 1) throw InvalidArgument("cyclotomic_polynomial: k must be >= 1");
  static thread_local std::map<int, detail::IntPoly> cache;
  if (auto it = cache.find(k); it != cache.end()) return it->second;
  detail::IntPoly p(static_cast<std::size_t>(k) + 1, 0);
  p[0] = -1;
  p[k] = 1;
  for (int d = 1; d < k; ++d) {
    if (k % d == 0) p = detail::poly_div_exact(p, cyclotomic_polynomial(d));
  }
  cache.emplace(k, p);
  return p;
}

/// An exact average (1/denominator) * sum_e counts[e] * omega^e.
class CycloAverage {
 public:
  CycloAverage(int k, std::vector<std::int64_t> counts,
               std::uint64_t denominator)
      : k_(k), counts_(std::move(counts)), denominator_(denominator) {
    if (counts_.size() != static_cast<std::size_t>(k)) {
      throw InvalidArgument("CycloAverage: need one count per exponent");
    }
    if (denominator_ == 0) throw InvalidArgument("CycloAverage: zero denominator");
  }

  int k() const { return k_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::uint64_t denominator() const { return denominator_; }

  /// True iff the average is exactly the integer m.
  bool equals(std::int64_t m) const {
    detail::IntPoly num(counts_.begin(), counts_.end());
    num[0] -= m * static_cast<std::int64_t>(denominator_);
    const auto r = detail::poly_mod(num, cyclotomic_polynomial(k_));
    return std::all_of(r.begin(), r.end(), [](auto c) { return c == 0; });
  }

  bool is_zero() const { return equals(0); }

  Scalar value() const {
    Scalar s{0.0, 0.0};
    for (int e = 0; e < k_; ++e) {
      if (counts_[e] != 0) {
        s += static_cast<double>(counts_[e]) * root_of_unity(k_, e);
      }
    }
    return s / static_cast<double>(denominator_);
  }

 private:
  int k_;
  std::vector<std::int64_t> counts_;
  std::uint64_t denominator_;
};

/// The generalized Rademacher function r_level for parameter k.
class GeneralizedRademacher {
 public:
  GeneralizedRademacher(int k, int level) : k_(k), level_(level) {
    if (k < 2) throw InvalidArgument("GeneralizedRademacher: k must be >= 2");
    if (level < 1) {
      throw InvalidArgument("GeneralizedRademacher: level must be >= 1");
    }
  }

  int k() const { return k_; }
  int level() const { return level_; }

  /// Value on the half-open interval containing t; t = 1 belongs to the last
  /// interval.
  CycloScalar eval(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw InvalidArgument("GeneralizedRademacher::eval: t outside [0,1]");
    }
    const double pieces = std::pow(static_cast<double>(k_), level_);
    if (t == 1.0) return CycloScalar(k_, k_ - 1);
    const double m = std::floor(t * pieces);
    return CycloScalar(k_, static_cast<int>(std::fmod(m, k_)));
  }

  /// Exact evaluation at the rational t = num/den.
  CycloScalar eval(std::uint64_t num, std::uint64_t den) const {
    if (den == 0 || num > den) {
      throw InvalidArgument("GeneralizedRademacher::eval: t outside [0,1]");
    }
    if (num == den) return CycloScalar(k_, k_ - 1);
    // floor(num * k^level / den) mod k, digit by digit to avoid overflow:
    // the level-th base-k digit of num/den.
    std::uint64_t rem = num;
    int digit = 0;
    for (int i = 0; i < level_; ++i) {
      const unsigned __int128 scaled = static_cast<unsigned __int128>(rem) * k_;
      digit = static_cast<int>(scaled / den);
      rem = static_cast<std::uint64_t>(scaled % den);
    }
    return CycloScalar(k_, digit);
  }

  /// Value on piece m of the uniform partition of [0,1] into k^depth pieces,
  /// depth >= level.
  CycloScalar on_piece(std::uint64_t m, int depth) const {
    std::uint64_t q = m;
    for (int i = level_; i < depth; ++i) q /= static_cast<std::uint64_t>(k_);
    return CycloScalar(k_, static_cast<int>(q % static_cast<std::uint64_t>(k_)));
  }

 private:
  int k_;
  int level_;
};

/// One factor coefficient * r_level of a step-function product.
struct StepFactor {
  int level;
  CycloScalar coefficient;
};

/// Exact integral over [0,1] of prod_j coefficient_j * r_{level_j}, computed
/// as the average over the k^depth constancy pieces.
inline CycloAverage integrate_step_product(std::span<const StepFactor> factors,
                                           int k, int depth) {
  if (k < 2) throw InvalidArgument("integrate_step_product: k must be >= 2");
  int max_level = 0;
  for (const auto& f : factors) {
    if (f.level < 1) throw InvalidArgument("integrate_step_product: level < 1");
    if (f.coefficient.k() != k) {
      throw InvalidArgument("integrate_step_product: coefficient order != k");
    }
    max_level = std::max(max_level, f.level);
  }
  if (depth < max_level) {
    throw InvalidArgument("integrate_step_product: depth " +
                          std::to_string(depth) + " below max level " +
                          std::to_string(max_level));
  }
  const std::uint64_t pieces =
      checked_power(static_cast<std::uint64_t>(k), depth, kMaxPieces,
                    "integrate_step_product");

  CycloScalar constant = CycloScalar::one(k);
  std::vector<GeneralizedRademacher> fns;
  fns.reserve(factors.size());
  for (const auto& f : factors) {
    constant = constant * f.coefficient;
    fns.emplace_back(k, f.level);
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  if (constant.is_zero()) return CycloAverage(k, std::move(counts), pieces);
  for (std::uint64_t m = 0; m < pieces; ++m) {
    CycloScalar prod = constant;
    for (const auto& r : fns) prod = prod * r.on_piece(m, depth);
    ++counts[static_cast<std::size_t>(prod.exponent())];
  }
  return CycloAverage(k, std::move(counts), pieces);
}

/// Integral over [0,1] of r_{n_1} ... r_{n_k}: exactly 1 if every level
/// occurs a multiple of k times, else 0. With k levels that means 1 iff all
/// levels are equal.
///
/// Different levels read independent base-k digits of t, so the integral
/// factors over distinct levels into (1/k) sum_d omega^(c d), which is 1 when
/// k divides the multiplicity c and 0 otherwise.
inline int integrate_product(std::span<const int> levels, int k) {
  if (k < 2) throw InvalidArgument("integrate_product: k must be >= 2");
  if (levels.size() != static_cast<std::size_t>(k)) {
    throw InvalidArgument("integrate_product: expected " + std::to_string(k) +
                          " levels, got " + std::to_string(levels.size()));
  }
  std::map<int, int> multiplicity;
  for (int n : levels) {
    if (n < 1) throw InvalidArgument("integrate_product: level < 1");
    ++multiplicity[n];
  }
  for (const auto& [level, c] : multiplicity) {
    if (c % k != 0) return 0;
  }
  return 1;
}

/// The same integral by summation over constancy pieces at depth max(levels).
inline CycloAverage integrate_product_piecewise(std::span<const int> levels,
                                                int k) {
  if (levels.size() != static_cast<std::size_t>(k)) {
    throw InvalidArgument("integrate_product_piecewise: expected " +
                          std::to_string(k) + " levels");
  }
  std::vector<StepFactor> factors;
  int depth = 0;
  for (int n : levels) {
    factors.push_back({n, CycloScalar::one(k)});
    depth = std::max(depth, n);
  }
  return integrate_step_product(factors, k, depth);
}

}  // namespace orthoadd
