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
/// Orthogonally additive k-homogeneous polynomials on l_p^n.
///
/// Every such polynomial has the form P(x) = sum_n c_n x_n^k, with
/// c_n = P(e_n) the diagonal of its symmetric k-linear form. Its sup norm
/// over the unit ball is ||c||_{p/(p-k)} when k < p and max |c_n| when
/// p <= k. This header provides the representation, the closed-form norm,
/// an explicit maximizer, an independent numerical maximizer, the diagonal
/// extension of a functional on the tensor diagonal, polarization, and
/// structural/behavioral additivity tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orthoadd/multilinear.hpp"
#include "orthoadd/numerics.hpp"

namespace orthoadd {

/// P(x) = sum_n c_n x_n^k.
class OrthAddPolynomial {
 public:
  OrthAddPolynomial(Vector coeffs, LpParams params)
      : coeffs_(std::move(coeffs)), params_(params) {
    require_finite(coeffs_, "OrthAddPolynomial");
  }

  const Vector& coeffs() const { return coeffs_; }
  const LpParams& params() const { return params_; }
  int degree() const { return params_.k(); }
  std::size_t dim() const { return coeffs_.size(); }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const Scalar& c) { return c == Scalar{0.0, 0.0}; });
  }

  Scalar operator()(std::span<const Scalar> x) const {
    if (x.size() != coeffs_.size()) {
      throw InvalidArgument("OrthAddPolynomial: dimension mismatch (" +
                            std::to_string(x.size()) + " vs " +
                            std::to_string(coeffs_.size()) + ")");
    }
    require_finite(x, "OrthAddPolynomial");
    Scalar s{0.0, 0.0};
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      s += coeffs_[i] * ipow(x[i], degree());
    }
    return s;
  }

  friend OrthAddPolynomial operator*(const Scalar& lambda,
                                     const OrthAddPolynomial& P) {
    Vector c = P.coeffs_;
    for (auto& z : c) z *= lambda;
    return OrthAddPolynomial(std::move(c), P.params_);
  }

  friend OrthAddPolynomial operator+(const OrthAddPolynomial& P,
                                     const OrthAddPolynomial& Q) {
    if (P.dim() != Q.dim() || !(P.params_ == Q.params_)) {
      throw InvalidArgument("OrthAddPolynomial: incompatible operands");
    }
    Vector c = P.coeffs_;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += Q.coeffs_[i];
    return OrthAddPolynomial(std::move(c), P.params_);
  }

 private:
  Vector coeffs_;
  LpParams params_;
};

inline Scalar evaluate(const OrthAddPolynomial& P, std::span<const Scalar> x) {
  return P(x);
}

/// ||P|| = ||c||_{p/(p-k)} for k < p, max |c_n| for p <= k.
inline double norm_closed_form(const OrthAddPolynomial& P) {
  return lq_norm(P.coeffs(), conjugate_exponent(P.params()));
}

struct NormWitness {
  Vector x;
  double value = 0.0;
};

/// A unit vector attaining ||P||.
///
/// For k < p: x_i = conj(phase_root(c_i, k)) |c_i|^(1/(p-k)), normalized in
/// l_p, which makes every term c_i x_i^k real and nonnegative. For p <= k:
/// the basis vector at the first index of maximal |c_n|.
inline NormWitness norm_witness(const OrthAddPolynomial& P) {
  if (P.is_zero()) {
    throw InvalidArgument("norm_witness: zero polynomial has no witness");
  }
  const auto& prm = P.params();
  const auto& c = P.coeffs();
  NormWitness w;
  w.x.assign(c.size(), Scalar{0.0, 0.0});
  if (prm.regime() == Regime::small_p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (std::abs(c[i]) > std::abs(c[best])) best = i;
    }
    w.x[best] = 1.0;
  } else {
    const double expo = 1.0 / (prm.p() - prm.k());
    double cmax = 0.0;
    for (const auto& ci : c) cmax = std::max(cmax, std::abs(ci));
    for (std::size_t i = 0; i < c.size(); ++i) {
      w.x[i] = std::conj(phase_root(c[i], prm.k())) *
               std::pow(std::abs(c[i]) / cmax, expo);
    }
    w.x = normalize_lp(std::move(w.x), prm.p());
  }
  w.value = std::abs(P(w.x));
  return w;
}

namespace detail {

/// Maximizes sum_i w_i z_i^k over z >= 0, ||z||_p = 1 from a random start.
/// Each step moves to the point where the current gradient attains its
/// l_p-dual norm (z_i proportional to (w_i z_i^(k-1))^(1/(p-1))); at a fixed
/// point this is the Lagrange condition of the problem.
inline std::vector<double> ascend_moduli(std::span<const double> w, double p,
                                         int k, int iters, std::mt19937_64& rng) {
  const std::size_t n = w.size();
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> z(n);
  for (auto& zi : z) zi = unif(rng);
  auto normalize = [p](std::vector<double>& v) {
    const double nrm = lq_norm(std::span<const double>(v), p);
    if (nrm > 0.0) {
      for (auto& vi : v) vi /= nrm;
    }
    return nrm > 0.0;
  };
  auto objective = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * ipow(v[i], k);
    return s;
  };
  normalize(z);
  std::vector<double> best = z;
  double best_val = objective(z);
  std::vector<double> g(n);
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) g[i] = w[i] * ipow(z[i], k - 1);
    if (p == 1.0) {
      const auto at = std::max_element(g.begin(), g.end()) - g.begin();
      std::fill(z.begin(), z.end(), 0.0);
      z[static_cast<std::size_t>(at)] = 1.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(g[i], 1.0 / (p - 1.0));
      if (!normalize(z)) break;
    }
    const double val = objective(z);
    if (val > best_val) {
      best_val = val;
      best = z;
    }
  }
  return best;
}

}  // namespace detail

/// Numerical lower bound on ||P|| by ascent over the l_p unit sphere with
/// random restarts. Deterministic given (restarts, iters, seed).
///
/// Over C, |P(x)| <= sum |c_i| |x_i|^k with equality after phase alignment,
/// so the search runs on moduli and the returned value is |P| evaluated at
/// the aligned point. Over R with even k only one sign class of coefficients
/// can be aligned at a time, so both classes are searched; over R with odd k
/// the complex answer is attained by real points. Field::real requires real
/// coefficients.
inline double norm_numeric(const OrthAddPolynomial& P, int restarts = 20,
                           int iters = 500, std::uint64_t seed = 0,
                           Field field = Field::complex) {
  if (restarts < 1 || iters < 1) {
    throw InvalidArgument("norm_numeric: restarts and iters must be >= 1");
  }
  const auto& c = P.coeffs();
  const int k = P.degree();
  const double p = P.params().p();
  if (c.empty()) return 0.0;
  if (field == Field::real) {
    for (const auto& ci : c) {
      if (ci.imag() != 0.0) {
        throw InvalidArgument("norm_numeric: real field needs real coefficients");
      }
    }
  }

  struct Search {
    std::vector<double> weights;
    std::vector<Scalar> align;  // x_i = align_i * z_i
  };
  std::vector<Search> searches;
  if (field == Field::real && k % 2 == 0) {
    Search pos, neg;
    for (const auto& ci : c) {
      pos.weights.push_back(std::max(ci.real(), 0.0));
      neg.weights.push_back(std::max(-ci.real(), 0.0));
      pos.align.emplace_back(1.0, 0.0);
      neg.align.emplace_back(1.0, 0.0);
    }
    searches = {pos, neg};
  } else {
    Search s;
    for (const auto& ci : c) {
      s.weights.push_back(std::abs(ci));
      if (field == Field::real) {
        s.align.emplace_back(ci.real() < 0.0 ? -1.0 : 1.0, 0.0);
      } else {
        s.align.push_back(std::conj(phase_root(ci, k)));
      }
    }
    searches = {s};
  }

  std::mt19937_64 rng(seed);
  double best = 0.0;
  Vector x(c.size());
  for (int r = 0; r < restarts; ++r) {
    for (const auto& s : searches) {
      const auto z = detail::ascend_moduli(s.weights, p, k, iters, rng);
      for (std::size_t i = 0; i < c.size(); ++i) x[i] = s.align[i] * z[i];
      best = std::max(best, std::abs(P(x)));
    }
  }
  return best;
}

/// The symmetric form vanishing off the diagonal with phi(e_n, ..., e_n) =
/// F_diag[n].
inline MultilinearForm extend_diagonal_functional(std::span<const Scalar> f_diag,
                                                  LpParams params) {
  require_finite(f_diag, "extend_diagonal_functional");
  MultilinearForm phi(f_diag.size(), params, false);
  std::vector<std::size_t> idx(static_cast<std::size_t>(params.k()));
  for (std::size_t i = 0; i < f_diag.size(); ++i) {
    std::fill(idx.begin(), idx.end(), i);
    phi.set_symmetric(idx, f_diag[i]);
  }
  return MultilinearForm(f_diag.size(), params, phi.coeffs(), true);
}

inline MultilinearForm to_form(const OrthAddPolynomial& P) {
  return extend_diagonal_functional(P.coeffs(), P.params());
}

struct DiagonalExtraction {
  Vector diagonal;
  double norm = 0.0;  ///< l_{p/(p-k)} norm, l_inf when p <= k
};

/// d_n = phi(e_n, ..., e_n) and its norm in the dual sequence space.
inline DiagonalExtraction diagonal_of_multilinear(const MultilinearForm& phi) {
  DiagonalExtraction out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(phi.degree()));
  for (std::size_t i = 0; i < phi.dim(); ++i) {
    std::fill(idx.begin(), idx.end(), i);
    out.diagonal.push_back(phi.at(idx));
  }
  out.norm = lq_norm(out.diagonal, conjugate_exponent(phi.params()));
  return out;
}

using PolynomialFn = std::function<Scalar(const Vector&)>;

/// Maximum of 2^k times the number of index multisets for polarization.
inline constexpr std::uint64_t kMaxPolarizationEvaluations = 1'000'000;

/// The unique symmetric k-linear form with phi(x, ..., x) = P(x), for P a
/// k-homogeneous polynomial on C^n given by evaluation:
///   phi(x_1, ..., x_k) = 1/(2^k k!) sum_{eps in {+-1}^k} eps_1...eps_k
///                        P(eps_1 x_1 + ... + eps_k x_k).
inline MultilinearForm polarize(const PolynomialFn& P, std::size_t n,
                                LpParams params) {
  const int k = params.k();
  if (k > 6) throw BudgetExceeded("polarize: degree above 6");
  // multisets of size k from n indices: C(n + k - 1, k)
  std::uint64_t multisets = 1;
  for (int j = 1; j <= k; ++j) multisets = multisets * (n + j - 1) / j;
  if ((multisets << k) > kMaxPolarizationEvaluations) {
    throw BudgetExceeded("polarize: 2^k * multisets exceeds budget");
  }
  MultilinearForm phi(n, params, false);
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) factorial *= j;
  const double norm = 1.0 / (static_cast<double>(1u << k) * factorial);

  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  Vector x(n);
  while (true) {
    Scalar sum{0.0, 0.0};
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      std::fill(x.begin(), x.end(), Scalar{0.0, 0.0});
      double sign = 1.0;
      for (int j = 0; j < k; ++j) {
        const double e = (mask >> j) & 1u ? -1.0 : 1.0;
        sign *= e;
        x[idx[j]] += e;
      }
      sum += sign * P(x);
    }
    phi.set_symmetric(idx, sum * norm);
    // next nondecreasing index tuple
    int j = k - 1;
    while (j >= 0 && idx[j] == n - 1) --j;
    if (j < 0) break;
    ++idx[j];
    for (int t = j + 1; t < k; ++t) idx[t] = idx[j];
  }
  return MultilinearForm(n, params, phi.coeffs(), true);
}

/// Polarization of the homogeneous polynomial x -> T(x, ..., x) for a dense,
/// not necessarily symmetric, coefficient tensor T.
inline MultilinearForm polarize(const MultilinearForm& dense) {
  return polarize([&](const Vector& x) { return dense.on_diagonal(x); },
                  dense.dim(), dense.params());
}

inline MultilinearForm polarize(const OrthAddPolynomial& P) {
  return polarize([&](const Vector& x) { return P(x); }, P.dim(), P.params());
}

struct AdditivityOptions {
  double structural_tol = 1e-12;
  double behavioral_tol = 1e-10;
  int samples = 64;
  std::uint64_t seed = 0;
};

struct AdditivityReport {
  bool structural = true;   ///< off-diagonal coefficients negligible
  bool behavioral = true;   ///< P(x+y) = P(x) + P(y) on sampled disjoint pairs
  bool agree() const { return structural == behavioral; }
  bool additive() const { return structural && behavioral; }

  /// Worst off-diagonal coefficient, relative to the largest coefficient.
  std::optional<std::vector<std::size_t>> worst_index;
  double worst_off_diagonal = 0.0;
  /// Worst |P(x+y) - P(x) - P(y)| / (|P(x)| + |P(y)| + 1) over the samples.
  double worst_residual = 0.0;
  Vector worst_x, worst_y;
};

/// Structural and behavioral orthogonal-additivity tests for a k-linear
/// form. Non-symmetric forms are symmetrized first. P is orthogonally
/// additive exactly when the symmetric form vanishes off the diagonal.
inline AdditivityReport is_orthogonally_additive(
    const MultilinearForm& form, const AdditivityOptions& opt = {}) {
  const MultilinearForm phi = form.symmetric() ? form : form.symmetrized();
  AdditivityReport rep;

  double cmax = 0.0;
  for (const auto& c : phi.coeffs()) cmax = std::max(cmax, std::abs(c));
  for (std::size_t f = 0; f < phi.size(); ++f) {
    auto idx = phi.multi_index(f);
    if (std::all_of(idx.begin(), idx.end(), [&](auto i) { return i == idx[0]; })) {
      continue;
    }
    const double m = std::abs(phi.coeffs()[f]);
    const double rel = cmax > 0.0 ? m / cmax : 0.0;
    if (rel > rep.worst_off_diagonal) {
      rep.worst_off_diagonal = rel;
      std::sort(idx.begin(), idx.end());
      rep.worst_index = idx;
    }
  }
  rep.structural = rep.worst_off_diagonal <= opt.structural_tol;

  const std::size_t n = phi.dim();
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> side(0, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // The first n samples put index s in x and all others in y; every
  // off-diagonal index tuple is split by one of them.
  const int probes = n >= 2 ? static_cast<int>(n) : 0;
  for (int s = 0; s < probes + opt.samples && n >= 2; ++s) {
    Vector x(n, Scalar{0.0, 0.0}), y(n, Scalar{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar v{gauss(rng), gauss(rng)};
      const int where = s < probes ? (i == static_cast<std::size_t>(s) ? 0 : 1)
                                   : side(rng);
      switch (where) {
        case 0: x[i] = v; break;
        case 1: y[i] = v; break;
        default: break;
      }
    }
    Vector xy(n);
    for (std::size_t i = 0; i < n; ++i) xy[i] = x[i] + y[i];
    const Scalar px = phi.on_diagonal(x), py = phi.on_diagonal(y);
    const double res = std::abs(phi.on_diagonal(xy) - px - py) /
                       (std::abs(px) + std::abs(py) + 1.0);
    if (res >= rep.worst_residual) {
      rep.worst_residual = res;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  }
  rep.behavioral = rep.worst_residual <= opt.behavioral_tol;
  return rep;
}

}  // namespace orthoadd
