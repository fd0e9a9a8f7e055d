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
/// Scalar and norm primitives shared by the rest of the library: l_q norms,
/// complex phases and their principal k-th roots, conjugate exponents.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace orthoadd {

using Scalar = std::complex<double>;
using Vector = std::vector<Scalar>;

/// Raised when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a request would exceed a fixed computational budget
/// (piece counts, dense tensor sizes).
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline bool is_finite(const Scalar& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(std::span<const Scalar> v, const char* what) {
  for (const auto& z : v) {
    if (!is_finite(z)) {
      throw InvalidArgument(std::string(what) + ": non-finite entry");
    }
  }
}

/// Scalar real embedding.
inline Vector to_scalars(std::span<const double> v) {
  return Vector(v.begin(), v.end());
}

/// Which side of the critical exponent p = k a parameter pair lies on.
enum class Regime {
  large_p,  ///< k < p: diagonal behaves like l_{p/k}, dual like l_{p/(p-k)}
  small_p,  ///< p <= k: diagonal behaves like l_1, dual like l_inf
};

/// Sequence-space exponent p and polynomial degree k.
///
/// Always satisfies 1 <= p < inf and k >= 1. Modules whose constructions need
/// k >= 2 (Rademacher averaging) check that themselves.
class LpParams {
 public:
  LpParams(double p, int k) : p_(p), k_(k) {
    if (!std::isfinite(p) || p < 1.0) {
      throw InvalidArgument("LpParams: p must satisfy 1 <= p < inf, got " +
                            std::to_string(p));
    }
    if (k < 1) {
      throw InvalidArgument("LpParams: degree k must be >= 1, got " +
                            std::to_string(k));
    }
  }

  double p() const { return p_; }
  int k() const { return k_; }

  Regime regime() const {
    return static_cast<double>(k_) < p_ ? Regime::large_p : Regime::small_p;
  }

  friend bool operator==(const LpParams&, const LpParams&) = default;

 private:
  double p_;
  int k_;
};

/// Sum of nonnegative reals in ascending order. The result depends only on
/// the multiset of inputs, so it is invariant under permutation, bit for bit.
inline double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

/// Complex sum with terms ordered by (modulus, re, im).
inline Scalar ordered_sum(std::vector<Scalar> terms) {
  std::sort(terms.begin(), terms.end(), [](const Scalar& a, const Scalar& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  Scalar s{0.0, 0.0};
  for (const auto& t : terms) s += t;
  return s;
}

/// ||v||_q = (sum |v_i|^q)^(1/q), or max |v_i| for q = inf. Empty input -> 0.
inline double lq_norm(std::span<const Scalar> v, double q) {
  if (std::isnan(q) || q < 1.0) {
    throw InvalidArgument("lq_norm: exponent must be >= 1, got " +
                          std::to_string(q));
  }
  require_finite(v, "lq_norm");
  if (v.empty()) return 0.0;
  if (std::isinf(q)) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
  }
  std::vector<double> terms;
  terms.reserve(v.size());
  if (q == 1.0) {
    for (const auto& z : v) terms.push_back(std::abs(z));
    return ordered_sum(std::move(terms));
  }
  // Scale by the largest modulus so |v_i|^q cannot overflow or underflow.
  double scale = 0.0;
  for (const auto& z : v) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;
  for (const auto& z : v) terms.push_back(std::pow(std::abs(z) / scale, q));
  return scale * std::pow(ordered_sum(std::move(terms)), 1.0 / q);
}

inline double lq_norm(std::span<const double> v, double q) {
  return lq_norm(to_scalars(v), q);
}

/// a / |a|, or 0 for a = 0 (the sign function for real a).
inline Scalar phase(const Scalar& a) {
  const double r = std::abs(a);
  if (r == 0.0) return {0.0, 0.0};
  if (a.imag() == 0.0) return {a.real() > 0.0 ? 1.0 : -1.0, 0.0};
  return a / r;
}

/// Principal k-th root of the phase of a: s with s^k = a/|a| and |s| = 1.
/// phase_root(0, k) = 1.
inline Scalar phase_root(const Scalar& a, int k) {
  if (k < 1) {
    throw InvalidArgument("phase_root: k must be >= 1");
  }
  if (!is_finite(a)) throw InvalidArgument("phase_root: non-finite input");
  if (std::abs(a) == 0.0) return {1.0, 0.0};
  if (a.imag() == 0.0 && a.real() > 0.0) return {1.0, 0.0};
  // Negative reals with k = 2 give exactly i rather than (6e-17, 1).
  if (a.imag() == 0.0 && k == 2) return {0.0, 1.0};
  return std::polar(1.0, std::arg(a) / static_cast<double>(k));
}

/// Dual exponent of p/k: p/(p-k) when k < p, inf when p <= k.
inline double conjugate_exponent(double p, int k) {
  const LpParams params(p, k);
  if (params.regime() == Regime::small_p) return kInfinity;
  return p / (p - static_cast<double>(k));
}

inline double conjugate_exponent(const LpParams& params) {
  return conjugate_exponent(params.p(), params.k());
}

/// Holder conjugate q' with 1/q + 1/q' = 1 (q = 1 -> inf, q = inf -> 1).
inline double holder_conjugate(double q) {
  if (q < 1.0) throw InvalidArgument("holder_conjugate: q must be >= 1");
  if (q == 1.0) return kInfinity;
  if (std::isinf(q)) return 1.0;
  return q / (q - 1.0);
}

/// z^k by repeated squaring, k >= 0.
inline Scalar ipow(Scalar z, int k) {
  Scalar r{1.0, 0.0};
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

inline double ipow(double x, int k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

/// Rescale v onto the unit sphere of l_p. The zero vector is returned as is.
inline Vector normalize_lp(Vector v, double p) {
  const double nrm = lq_norm(v, p);
  if (nrm == 0.0) return v;
  for (auto& z : v) z /= nrm;
  return v;
}

}  // namespace orthoadd
