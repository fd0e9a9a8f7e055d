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
/// Dense k-linear forms on C^n and norm estimation over products of l_p
/// unit balls.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orthoadd/diagonal.hpp"
#include "orthoadd/numerics.hpp"

namespace orthoadd {

/// Scalar field over which suprema are taken.
enum class Field { complex, real };

/// phi(x_1, ..., x_k) = sum coeffs[i_1 ... i_k] x_{1,i_1} ... x_{k,i_k}.
///
/// Coefficients are stored row-major with i_1 most significant. When
/// `symmetric()` is set the coefficients are invariant under every
/// permutation of the index tuple.
class MultilinearForm {
 public:
  MultilinearForm(std::size_t n, LpParams params, bool symmetric = false)
      : n_(n), params_(params), symmetric_(symmetric) {
    const auto size = checked_power(n, params.k(), kMaxDenseCoefficients,
                                    "MultilinearForm");
    coeffs_.assign(size, Scalar{0.0, 0.0});
  }

  MultilinearForm(std::size_t n, LpParams params, Vector coeffs,
                  bool symmetric = false)
      : MultilinearForm(n, params, false) {
    if (coeffs.size() != coeffs_.size()) {
      throw InvalidArgument("MultilinearForm: expected " +
                            std::to_string(coeffs_.size()) +
                            " coefficients, got " +
                            std::to_string(coeffs.size()));
    }
    require_finite(coeffs, "MultilinearForm");
    coeffs_ = std::move(coeffs);
    if (symmetric && !is_symmetric()) {
      throw InvalidArgument("MultilinearForm: coefficients are not symmetric");
    }
    symmetric_ = symmetric;
  }

  std::size_t dim() const { return n_; }
  int degree() const { return params_.k(); }
  const LpParams& params() const { return params_; }
  bool symmetric() const { return symmetric_; }
  const Vector& coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (std::size_t i : idx) f = f * n_ + i;
    return f;
  }

  std::vector<std::size_t> multi_index(std::size_t flat) const {
    std::vector<std::size_t> idx(static_cast<std::size_t>(degree()));
    for (int j = degree() - 1; j >= 0; --j) {
      idx[j] = flat % n_;
      flat /= n_;
    }
    return idx;
  }

  const Scalar& at(std::span<const std::size_t> idx) const {
    return coeffs_[flat_index(idx)];
  }

  /// Writes one coefficient; clears the symmetric flag.
  void set(std::span<const std::size_t> idx, const Scalar& v) {
    coeffs_[flat_index(idx)] = v;
    symmetric_ = false;
  }

  /// Writes v at every permutation of idx, preserving symmetry.
  void set_symmetric(std::vector<std::size_t> idx, const Scalar& v) {
    std::sort(idx.begin(), idx.end());
    do {
      coeffs_[flat_index(idx)] = v;
    } while (std::next_permutation(idx.begin(), idx.end()));
  }

  /// Exact test: every coefficient equals those at permuted indices.
  bool is_symmetric() const {
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
      auto idx = multi_index(f);
      auto sorted = idx;
      std::sort(sorted.begin(), sorted.end());
      if (coeffs_[flat_index(sorted)] != coeffs_[f]) return false;
    }
    return true;
  }

  /// Average of the coefficients over all permutations of each index tuple.
  MultilinearForm symmetrized() const {
    MultilinearForm out(n_, params_, false);
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
      auto idx = multi_index(f);
      std::sort(idx.begin(), idx.end());
      if (flat_index(idx) != f) continue;  // handle each multiset once
      Scalar sum{0.0, 0.0};
      std::size_t count = 0;
      do {
        sum += coeffs_[flat_index(idx)];
        ++count;
      } while (std::next_permutation(idx.begin(), idx.end()));
      out.set_symmetric(idx, sum / static_cast<double>(count));
    }
    out.symmetric_ = true;
    return out;
  }

  Scalar operator()(std::span<const Vector> xs) const {
    check_args(xs);
    Scalar s{0.0, 0.0};
    const int k = degree();
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
      if (coeffs_[f] != Scalar{0.0, 0.0}) {
        Scalar t = coeffs_[f];
        for (int j = 0; j < k; ++j) t *= xs[j][idx[j]];
        s += t;
      }
      advance(idx);
    }
    return s;
  }

  /// phi(x, ..., x).
  Scalar on_diagonal(const Vector& x) const {
    std::vector<Vector> xs(static_cast<std::size_t>(degree()), x);
    return (*this)(xs);
  }

  /// g with phi(x_1, ..., y, ..., x_k) = sum_i g_i y_i, y in slot `slot`.
  /// The entry xs[slot] is ignored.
  Vector contract_except(std::span<const Vector> xs, int slot) const {
    check_args(xs);
    const int k = degree();
    Vector g(n_, Scalar{0.0, 0.0});
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    for (std::size_t f = 0; f < coeffs_.size(); ++f) {
      if (coeffs_[f] != Scalar{0.0, 0.0}) {
        Scalar t = coeffs_[f];
        for (int j = 0; j < k; ++j) {
          if (j != slot) t *= xs[j][idx[j]];
        }
        g[idx[slot]] += t;
      }
      advance(idx);
    }
    return g;
  }

 private:
  void check_args(std::span<const Vector> xs) const {
    if (xs.size() != static_cast<std::size_t>(degree())) {
      throw InvalidArgument("MultilinearForm: expected " +
                            std::to_string(degree()) + " arguments");
    }
    for (const auto& x : xs) {
      if (x.size() != n_) {
        throw InvalidArgument("MultilinearForm: argument dimension mismatch");
      }
    }
  }

  void advance(std::vector<std::size_t>& idx) const {
    for (std::size_t j = idx.size(); j-- > 0;) {
      if (++idx[j] < n_) return;
      idx[j] = 0;
    }
  }

  std::size_t n_;
  LpParams params_;
  bool symmetric_;
  Vector coeffs_;
};

/// Unit vector y maximizing |sum_i g_i y_i| over the l_p unit ball (Holder
/// equality case). The maximum itself is ||g||_{p'}.
inline Vector holder_maximizer(const Vector& g, double p, Field field) {
  Vector y(g.size(), Scalar{0.0, 0.0});
  auto align = [field](const Scalar& gi) {
    if (field == Field::real) {
      return Scalar{gi.real() >= 0.0 ? 1.0 : -1.0, 0.0};
    }
    const Scalar s = std::conj(phase(gi));
    return s == Scalar{0.0, 0.0} ? Scalar{1.0, 0.0} : s;
  };
  if (p == 1.0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (std::abs(g[i]) > std::abs(g[best])) best = i;
    }
    if (!g.empty()) y[best] = align(g[best]);
    return y;
  }
  const double q = holder_conjugate(p);
  const double gn = lq_norm(g, q);
  if (gn == 0.0) {
    if (!g.empty()) y[0] = 1.0;
    return y;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m = std::abs(g[i]) / gn;
    y[i] = align(g[i]) * std::pow(m, q - 1.0);
  }
  return y;
}

struct FormNormEstimate {
  double value = 0.0;
  std::vector<Vector> maximizer;
};

/// Lower estimate of ||phi|| = sup |phi(x_1, ..., x_k)| over ||x_j||_p <= 1
/// by alternating ascent: each step replaces one slot by the Holder maximizer
/// of the linear functional left after fixing the others, which never
/// decreases |phi|. Best value over `restarts` random starts.
///
/// With Field::real the coefficients must be real and the search runs over
/// real vectors.
inline FormNormEstimate estimate_form_norm(const MultilinearForm& phi,
                                           int restarts, int iters,
                                           std::uint64_t seed,
                                           Field field = Field::complex) {
  if (restarts < 1 || iters < 1) {
    throw InvalidArgument("estimate_form_norm: restarts and iters must be >= 1");
  }
  if (field == Field::real) {
    for (const auto& c : phi.coeffs()) {
      if (c.imag() != 0.0) {
        throw InvalidArgument("estimate_form_norm: real field needs real form");
      }
    }
  }
  const int k = phi.degree();
  const std::size_t n = phi.dim();
  const double p = phi.params().p();
  const double q = holder_conjugate(p);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  FormNormEstimate best;
  for (int r = 0; r < restarts; ++r) {
    std::vector<Vector> xs(static_cast<std::size_t>(k), Vector(n));
    for (auto& x : xs) {
      for (auto& z : x) {
        const double re = gauss(rng);
        const double im = field == Field::complex ? gauss(rng) : 0.0;
        z = {re, im};
      }
      x = normalize_lp(std::move(x), p);
    }
    double value = std::abs(phi(xs));
    for (int it = 0; it < iters; ++it) {
      const double before = value;
      for (int j = 0; j < k; ++j) {
        const Vector g = phi.contract_except(xs, j);
        xs[j] = holder_maximizer(g, p, field);
        value = lq_norm(g, q);
      }
      if (value - before <= 1e-15 * std::max(value, 1.0)) break;
    }
    value = std::abs(phi(xs));
    if (value > best.value || best.maximizer.empty()) {
      best.value = value;
      best.maximizer = xs;
    }
  }
  return best;
}

}  // namespace orthoadd
