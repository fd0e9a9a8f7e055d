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
/// Experiment runner behind the command-line tool: seeded verification
/// suites over single instances or parameter grids, producing result records
/// serialized as JSON or CSV.
///
/// Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 invalid
/// configuration, 3 resource budget exceeded.

#pragma once

#include <atomic>
#include <chrono>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orthoadd/diagonal.hpp"
#include "orthoadd/multilinear.hpp"
#include "orthoadd/numerics.hpp"
#include "orthoadd/oapoly.hpp"
#include "orthoadd/rademacher.hpp"

namespace orthoadd::experiment {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInvalidConfig = 2,
  kExitBudgetExceeded = 3,
};

enum class Format { json, csv };

/// Named tolerances; every check in a record refers to one of these.
inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> defaults = {
      {"behavioral", 1e-10},     {"isometry", 1e-6},  {"linf", 1e-12},
      {"reconstruction", 1e-12}, {"roundtrip", 1e-12}, {"sandwich", 1e-10},
      {"structural", 1e-12},     {"witness", 1e-12},  {"zalduendo", 1e-6},
  };
  return defaults;
}

struct ExperimentConfig {
  std::string command;
  int k = 2;
  double p = 4.0;
  int n = 4;
  std::uint64_t seed = 0;
  int trials = 1;
  int depth = 3;
  int restarts = 20;
  int iters = 500;
  std::optional<Vector> coeffs;
  double off_diagonal = 0.0;
  std::map<std::string, double> tol = default_tolerances();
  Format format = Format::json;
  std::string out;
  int workers = 1;
  bool timing = false;
  bool inject_fault = false;
  std::vector<int> k_grid = {2, 3};
  std::vector<std::string> p_grid = {"k+1", "2k"};
  std::vector<int> n_grid = {2, 4, 8};

  double tolerance(const std::string& name) const {
    auto it = tol.find(name);
    if (it == tol.end()) throw InvalidArgument("unknown tolerance: " + name);
    return it->second;
  }
};

struct Check {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass() const { return deviation <= tolerance; }
};

struct ResultRecord {
  std::string command;
  Json parameters = Json::object();
  std::vector<std::pair<std::string, double>> values;
  std::vector<Check> checks;
  std::string note;
  std::optional<double> wall_time_s;

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass()) return false;
    }
    return true;
  }

  void add_check(std::string name, double deviation, double tolerance) {
    checks.push_back({std::move(name), std::max(deviation, 0.0), tolerance});
  }
};

struct RunResult {
  std::vector<ResultRecord> records;
  int exit_code = kExitOk;
};

// ---------------------------------------------------------------------------
// Parsing helpers

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  // strtod rather than stod: subnormal results are valid input.
  char* end = nullptr;
  const double v = s.empty() ? 0.0 : std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidArgument("cannot parse " + what + ": '" + text + "'");
  }
  return v;
}

/// Parses "1.5", "-2", "3+4i", "3-4.5i", "2i", "-i", "1e-3-2e-1i".
inline Scalar parse_scalar(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw InvalidArgument("empty coefficient");
  if (s.back() != 'i') return {parse_real(s, "coefficient"), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not the leading one or part of an exponent
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' &&
        body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_part = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, "imaginary part");
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split), "real part"),
          imag_part(body.substr(split))};
}

inline Vector parse_coefficients(const std::string& text) {
  Vector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_scalar(item));
  if (out.empty()) throw InvalidArgument("empty coefficient list");
  require_finite(out, "coefficients");
  return out;
}

inline Scalar scalar_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_scalar(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InvalidArgument("coefficient must be a number, [re, im] or string");
}

inline Vector coefficients_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgument("coeffs must be a nonempty array");
  }
  Vector out;
  for (const auto& e : j) out.push_back(scalar_from_json(e));
  require_finite(out, "coefficients");
  return out;
}

/// Evaluates a grid exponent expression relative to k: "4", "k", "k+1",
/// "k-0.5", "2k", "2*k".
inline double parse_p_expression(const std::string& text, int k) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s += c;
  }
  const auto pos = s.find('k');
  if (pos == std::string::npos) return parse_real(s, "p expression");
  const double kd = static_cast<double>(k);
  if (pos == 0) {
    if (s.size() == 1) return kd;
    if (s[1] == '+') return kd + parse_real(s.substr(2), "p expression");
    if (s[1] == '-') return kd - parse_real(s.substr(2), "p expression");
    throw InvalidArgument("cannot parse p expression: '" + text + "'");
  }
  if (pos + 1 != s.size()) {
    throw InvalidArgument("cannot parse p expression: '" + text + "'");
  }
  std::string factor = s.substr(0, pos);
  if (!factor.empty() && factor.back() == '*') factor.pop_back();
  return parse_real(factor, "p expression") * kd;
}

inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_scalar(const Scalar& z) {
  if (z.imag() == 0.0) return format_real(z.real());
  std::string s = format_real(z.real());
  if (!(z.imag() < 0.0)) s += '+';
  return s + format_real(z.imag()) + "i";
}

inline std::string format_coefficients(const Vector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_scalar(v[i]);
  }
  return s;
}

inline Json json_real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

inline Json coefficients_to_json(const Vector& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(Json::array({z.real(), z.imag()}));
  return a;
}

/// Validates a configuration; throws InvalidArgument.
inline void validate(const ExperimentConfig& cfg) {
  static const std::vector<std::string> commands = {
      "verify-rademacher", "pi-norm",         "oa-norm",
      "additivity-test",   "zalduendo-check", "sweep"};
  if (std::find(commands.begin(), commands.end(), cfg.command) ==
      commands.end()) {
    throw InvalidArgument("unknown command: '" + cfg.command + "'");
  }
  if (cfg.trials < 1) throw InvalidArgument("trials must be >= 1");
  if (cfg.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (cfg.restarts < 1 || cfg.iters < 1) {
    throw InvalidArgument("restarts and iters must be >= 1");
  }
  if (cfg.n < 1) throw InvalidArgument("n must be >= 1");
  if (cfg.depth < 1) throw InvalidArgument("depth must be >= 1");
  for (const auto& [name, v] : cfg.tol) {
    if (!default_tolerances().count(name)) {
      throw InvalidArgument("unknown tolerance name: " + name);
    }
    if (!(v >= 0.0)) throw InvalidArgument("tolerance " + name + " must be >= 0");
  }
  if (cfg.command == "sweep") {
    if (cfg.k_grid.empty() || cfg.p_grid.empty() || cfg.n_grid.empty()) {
      throw InvalidArgument("sweep grids must be nonempty");
    }
    for (int k : cfg.k_grid) {
      for (const auto& pe : cfg.p_grid) LpParams(parse_p_expression(pe, k), k);
      if (k < 2) throw InvalidArgument("sweep needs k >= 2");
    }
    for (int n : cfg.n_grid) {
      if (n < 1) throw InvalidArgument("sweep needs n >= 1");
    }
    return;
  }
  const LpParams params(cfg.p, cfg.k);  // throws on invalid (p, k)
  const bool needs_k2 = cfg.command == "verify-rademacher" ||
                        cfg.command == "pi-norm";
  if (needs_k2 && cfg.k < 2) {
    throw InvalidArgument(cfg.command + " needs k >= 2");
  }
  if (cfg.command == "zalduendo-check" && cfg.k < 2) {
    throw InvalidArgument("zalduendo-check needs k >= 2");
  }
  if (cfg.command == "additivity-test" && cfg.off_diagonal != 0.0) {
    const std::size_t dim = cfg.coeffs ? cfg.coeffs->size() : cfg.n;
    if (dim < 2 || cfg.k < 2) {
      throw InvalidArgument("--off-diagonal needs n >= 2 and k >= 2");
    }
  }
}

// ---------------------------------------------------------------------------
// Instances

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of case `index` derived from the run seed.
inline std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

inline Vector random_coefficients(std::size_t n, std::mt19937_64& rng,
                                  bool complex) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (auto& z : v) {
    const double re = gauss(rng);
    z = {re, complex ? gauss(rng) : 0.0};
  }
  return v;
}

inline double rel_dev(double value, double reference) {
  const double d = std::abs(value - reference);
  return reference != 0.0 ? d / std::abs(reference) : d;
}

inline Json params_json(int k, double p, std::size_t n, std::uint64_t seed) {
  Json j;
  j["k"] = k;
  j["p"] = p;
  j["n"] = n;
  j["seed"] = seed;
  return j;
}

// ---------------------------------------------------------------------------
// Suites. Each appends values and checks to a record.

inline void suite_pi_norm(const DiagonalTensor& u, const ExperimentConfig& cfg,
                          ResultRecord& rec, bool inject_fault = false) {
  double closed = pi_norm_closed_form(u);
  if (inject_fault) closed *= 1.0 + 1e-3;
  const double upper = pi_upper_bound(u);
  const double lower = pi_lower_bound(u);
  rec.values.emplace_back("pi_closed_form", closed);
  rec.values.emplace_back("pi_upper_bound", upper);
  rec.values.emplace_back("pi_lower_bound", lower);
  const double tol = cfg.tolerance("sandwich");
  const double scale = closed != 0.0 ? closed : 1.0;
  rec.add_check("lower_le_closed", (lower - closed) / scale, tol);
  rec.add_check("closed_le_upper", (closed - upper) / scale, tol);
  const double hi = std::max({closed, upper, lower});
  const double lo = std::min({closed, upper, lower});
  rec.add_check("sandwich_spread", (hi - lo) / scale, tol);
}

inline void suite_reconstruction(const DiagonalTensor& u,
                                 const ExperimentConfig& cfg,
                                 ResultRecord& rec) {
  const auto terms = averaging_decomposition(u, true);
  const auto dense = dense_expansion(terms, u.dim(), u.degree());
  const double a1 = lq_norm(u.coeffs(), 1.0);
  double off = 0.0, diag = 0.0;
  const int k = u.degree();
  for (std::size_t f = 0; f < dense.size(); ++f) {
    std::size_t q = f, first = f % u.dim();
    bool on_diag = true;
    for (int j = 0; j < k; ++j) {
      if (q % u.dim() != first) on_diag = false;
      q /= u.dim();
    }
    if (on_diag) {
      const Scalar a = u.coeffs()[first];
      diag = std::max(diag, std::abs(dense[f] - a) /
                                std::max(std::abs(a), 1e-300));
    } else {
      off = std::max(off, std::abs(dense[f]));
    }
  }
  rec.values.emplace_back("averaging_terms", static_cast<double>(terms.size()));
  const double tol = cfg.tolerance("reconstruction");
  rec.add_check("reconstruction_off_diagonal", a1 > 0.0 ? off / a1 : off, tol);
  rec.add_check("reconstruction_diagonal", diag, tol);
}

inline void suite_oa_norm(const OrthAddPolynomial& P,
                          const ExperimentConfig& cfg, std::uint64_t seed,
                          ResultRecord& rec) {
  const double closed = norm_closed_form(P);
  const double numeric = norm_numeric(P, cfg.restarts, cfg.iters, seed);
  rec.values.emplace_back("norm_closed_form", closed);
  rec.values.emplace_back("norm_numeric", numeric);
  rec.add_check("numeric_vs_closed", rel_dev(numeric, closed),
                cfg.tolerance("isometry"));
  if (P.is_zero()) {
    rec.note = "witness: zero polynomial has no witness";
    return;
  }
  const auto w = norm_witness(P);
  rec.values.emplace_back("witness_value", w.value);
  rec.parameters["witness"] = coefficients_to_json(w.x);
  rec.add_check("witness_vs_closed", rel_dev(w.value, closed),
                cfg.tolerance("witness"));
}

/// For p <= k: random unit vectors never beat max |c_n|, basis vectors
/// attain it.
inline void suite_linf(const OrthAddPolynomial& P, std::mt19937_64& rng,
                       int samples, const ExperimentConfig& cfg,
                       ResultRecord& rec) {
  const double closed = norm_closed_form(P);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector x = normalize_lp(random_coefficients(P.dim(), rng, true),
                                  P.params().p());
    worst = std::max(worst, std::abs(P(x)));
  }
  double basis = 0.0;
  Vector e(P.dim(), Scalar{0.0, 0.0});
  for (std::size_t i = 0; i < P.dim(); ++i) {
    e[i] = 1.0;
    basis = std::max(basis, std::abs(P(e)));
    e[i] = 0.0;
  }
  rec.values.emplace_back("linf_sampled_max", worst);
  rec.add_check("linf_sampled_le_closed", worst - closed, cfg.tolerance("linf"));
  rec.add_check("linf_basis_attains", std::abs(basis - closed), 0.0);
}

inline void suite_additivity(const MultilinearForm& phi,
                             const ExperimentConfig& cfg, std::uint64_t seed,
                             ResultRecord& rec) {
  AdditivityOptions opt;
  opt.structural_tol = cfg.tolerance("structural");
  opt.behavioral_tol = cfg.tolerance("behavioral");
  opt.seed = seed;
  opt.samples = std::max(8, cfg.trials);
  const auto rep = is_orthogonally_additive(phi, opt);
  rec.values.emplace_back("structural_additive", rep.structural ? 1.0 : 0.0);
  rec.values.emplace_back("behavioral_additive", rep.behavioral ? 1.0 : 0.0);
  rec.values.emplace_back("worst_off_diagonal", rep.worst_off_diagonal);
  rec.values.emplace_back("worst_residual", rep.worst_residual);
  if (rep.worst_index) rec.parameters["worst_index"] = *rep.worst_index;
  rec.add_check("structural_agrees_with_behavioral", rep.agree() ? 0.0 : 1.0,
                0.0);
}

inline void suite_roundtrip(const OrthAddPolynomial& P,
                            const ExperimentConfig& cfg, ResultRecord& rec) {
  const auto ext = diagonal_of_multilinear(to_form(P));
  double exact = 0.0;
  for (std::size_t i = 0; i < P.dim(); ++i) {
    if (ext.diagonal[i] != P.coeffs()[i]) exact = 1.0;
  }
  rec.add_check("extension_roundtrip_exact", exact, 0.0);
  const auto polar = diagonal_of_multilinear(polarize(P));
  double dev = 0.0;
  const double cmax = lq_norm(P.coeffs(), kInfinity);
  for (std::size_t i = 0; i < P.dim(); ++i) {
    dev = std::max(dev, std::abs(polar.diagonal[i] - P.coeffs()[i]));
  }
  rec.add_check("polarization_diagonal", cmax > 0.0 ? dev / cmax : dev,
                cfg.tolerance("roundtrip"));
}

// ---------------------------------------------------------------------------
// Commands

inline std::vector<ResultRecord> cmd_verify_rademacher(
    const ExperimentConfig& cfg) {
  const int k = cfg.k;
  const int depth = cfg.depth;
  checked_power(static_cast<std::uint64_t>(k), depth, kMaxPieces,
                "verify-rademacher pieces");
  const std::uint64_t tuples = checked_power(
      static_cast<std::uint64_t>(depth), k, kMaxPieces, "verify-rademacher tuples");
  std::vector<ResultRecord> out;
  std::vector<int> levels(static_cast<std::size_t>(k), 1);
  for (std::uint64_t t = 0; t < tuples; ++t) {
    ResultRecord rec;
    rec.command = cfg.command;
    rec.parameters["k"] = k;
    rec.parameters["depth"] = depth;
    rec.parameters["levels"] = levels;
    const bool all_equal =
        std::all_of(levels.begin(), levels.end(), [&](int l) { return l == levels[0]; });
    const int expected = all_equal ? 1 : 0;
    const int rule = integrate_product(levels, k);
    const auto piecewise = integrate_product_piecewise(levels, k);
    const bool pw_one = piecewise.equals(1), pw_zero = piecewise.is_zero();
    rec.values.emplace_back("expected", expected);
    rec.values.emplace_back("multiplicity_rule", rule);
    rec.values.emplace_back("piecewise_sum",
                            pw_one ? 1.0 : (pw_zero ? 0.0 : piecewise.value().real()));
    rec.add_check("multiplicity_rule_exact", rule == expected ? 0.0 : 1.0, 0.0);
    rec.add_check("piecewise_sum_exact",
                  piecewise.equals(expected) ? 0.0 : 1.0, 0.0);
    out.push_back(std::move(rec));
    // advance the level tuple in base `depth`
    for (int j = k - 1; j >= 0; --j) {
      if (++levels[j] <= depth) break;
      levels[j] = 1;
    }
  }
  return out;
}

/// Coefficient vectors for single-instance commands: the configured list, or
/// `trials` seeded random vectors of dimension n.
inline std::vector<std::pair<Vector, std::uint64_t>> instances(
    const ExperimentConfig& cfg, bool complex) {
  std::vector<std::pair<Vector, std::uint64_t>> out;
  if (cfg.coeffs) {
    out.emplace_back(*cfg.coeffs, cfg.seed);
    return out;
  }
  for (int t = 0; t < cfg.trials; ++t) {
    const auto s = case_seed(cfg.seed, static_cast<std::uint64_t>(t));
    std::mt19937_64 rng(s);
    out.emplace_back(random_coefficients(cfg.n, rng, complex), s);
  }
  return out;
}

inline ResultRecord base_record(const ExperimentConfig& cfg, const Vector& c,
                                std::uint64_t seed) {
  ResultRecord rec;
  rec.command = cfg.command;
  rec.parameters = params_json(cfg.k, cfg.p, c.size(), seed);
  rec.parameters["coeffs"] = format_coefficients(c);
  return rec;
}

inline std::vector<ResultRecord> cmd_pi_norm(const ExperimentConfig& cfg) {
  std::vector<ResultRecord> out;
  for (const auto& [c, s] : instances(cfg, false)) {
    auto rec = base_record(cfg, c, s);
    suite_pi_norm(DiagonalTensor(c, LpParams(cfg.p, cfg.k)), cfg, rec,
                  cfg.inject_fault && out.empty());
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<ResultRecord> cmd_oa_norm(const ExperimentConfig& cfg) {
  std::vector<ResultRecord> out;
  for (const auto& [c, s] : instances(cfg, false)) {
    auto rec = base_record(cfg, c, s);
    const OrthAddPolynomial P(c, LpParams(cfg.p, cfg.k));
    suite_oa_norm(P, cfg, s, rec);
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<ResultRecord> cmd_additivity(const ExperimentConfig& cfg) {
  std::vector<ResultRecord> out;
  for (const auto& [c, s] : instances(cfg, false)) {
    auto rec = base_record(cfg, c, s);
    const LpParams params(cfg.p, cfg.k);
    MultilinearForm phi = extend_diagonal_functional(c, params);
    if (cfg.off_diagonal != 0.0) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(cfg.k), 0);
      idx.back() = 1;
      phi.set_symmetric(idx, cfg.off_diagonal);
      rec.parameters["off_diagonal"] = cfg.off_diagonal;
    }
    suite_additivity(phi, cfg, s, rec);
    out.push_back(std::move(rec));
  }
  return out;
}

/// Random real symmetric k-linear form on R^n with N(0,1) entries.
inline MultilinearForm random_symmetric_form(std::size_t n, LpParams params,
                                             std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MultilinearForm phi(n, params, false);
  const int k = params.k();
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    phi.set_symmetric(idx, gauss(rng));
    int j = k - 1;
    while (j >= 0 && idx[j] == n - 1) --j;
    if (j < 0) break;
    ++idx[j];
    for (int t = j + 1; t < k; ++t) idx[t] = idx[j];
  }
  return MultilinearForm(n, params, phi.coeffs(), true);
}

inline std::vector<ResultRecord> cmd_zalduendo(const ExperimentConfig& cfg) {
  std::vector<ResultRecord> out;
  const LpParams params(cfg.p, cfg.k);
  for (int t = 0; t < cfg.trials; ++t) {
    const auto s = case_seed(cfg.seed, static_cast<std::uint64_t>(t));
    std::mt19937_64 rng(s);
    const auto phi = random_symmetric_form(cfg.n, params, rng);
    ResultRecord rec;
    rec.command = cfg.command;
    rec.parameters = params_json(cfg.k, cfg.p, cfg.n, s);
    const auto d = diagonal_of_multilinear(phi);
    const auto est = estimate_form_norm(phi, cfg.restarts, cfg.iters, s,
                                        Field::real);
    rec.values.emplace_back("diagonal_norm", d.norm);
    rec.values.emplace_back("form_norm_estimate", est.value);
    rec.values.emplace_back("ratio", est.value > 0.0 ? d.norm / est.value : 0.0);
    rec.add_check("diagonal_le_form_norm", d.norm - est.value,
                  cfg.tolerance("zalduendo"));
    out.push_back(std::move(rec));
  }
  return out;
}

struct SweepCase {
  int k;
  double p;
  std::string p_expr;
  int n;
  int trial;
};

inline std::vector<SweepCase> sweep_cases(const ExperimentConfig& cfg) {
  std::vector<SweepCase> cases;
  for (int k : cfg.k_grid) {
    for (const auto& pe : cfg.p_grid) {
      for (int n : cfg.n_grid) {
        for (int t = 0; t < cfg.trials; ++t) {
          cases.push_back({k, parse_p_expression(pe, k), pe, n, t});
        }
      }
    }
  }
  return cases;
}

inline ResultRecord run_sweep_case(const ExperimentConfig& cfg,
                                   const SweepCase& sc, std::uint64_t index) {
  const auto s = case_seed(cfg.seed, index);
  std::mt19937_64 rng(s);
  const LpParams params(sc.p, sc.k);
  // odd trials use complex coefficients
  const Vector c = random_coefficients(sc.n, rng, sc.trial % 2 == 1);
  ResultRecord rec;
  rec.command = cfg.command;
  rec.parameters = params_json(sc.k, sc.p, sc.n, s);
  rec.parameters["p_expr"] = sc.p_expr;
  rec.parameters["trial"] = sc.trial;
  rec.parameters["regime"] =
      params.regime() == Regime::large_p ? "k<p" : "p<=k";
  rec.parameters["coeffs"] = format_coefficients(c);

  const DiagonalTensor u(c, params);
  suite_pi_norm(u, cfg, rec, cfg.inject_fault && index == 0);
  suite_reconstruction(u, cfg, rec);
  const OrthAddPolynomial P(c, params);
  if (params.regime() == Regime::large_p) {
    suite_oa_norm(P, cfg, s, rec);
  } else {
    suite_linf(P, rng, 200, cfg, rec);
    const auto w = norm_witness(P);
    rec.values.emplace_back("witness_value", w.value);
    rec.add_check("witness_vs_closed", rel_dev(w.value, norm_closed_form(P)),
                  cfg.tolerance("witness"));
  }
  suite_additivity(to_form(P), cfg, s, rec);
  suite_roundtrip(P, cfg, rec);
  return rec;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads; results are
/// stored by index so output order does not depend on scheduling.
template <class Fn>
std::vector<ResultRecord> run_indexed(std::size_t count, int workers, Fn fn) {
  std::vector<ResultRecord> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  const auto nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

inline std::vector<ResultRecord> cmd_sweep(const ExperimentConfig& cfg) {
  const auto cases = sweep_cases(cfg);
  return run_indexed(cases.size(), cfg.workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rec = run_sweep_case(cfg, cases[i], i);
    if (cfg.timing) {
      rec.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    }
    return rec;
  });
}

/// Runs the configured command. Throws InvalidArgument or BudgetExceeded;
/// see exit_code_for().
inline RunResult run(const ExperimentConfig& cfg) {
  validate(cfg);
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.command == "verify-rademacher") {
    r.records = cmd_verify_rademacher(cfg);
  } else if (cfg.command == "pi-norm") {
    r.records = cmd_pi_norm(cfg);
  } else if (cfg.command == "oa-norm") {
    r.records = cmd_oa_norm(cfg);
  } else if (cfg.command == "additivity-test") {
    r.records = cmd_additivity(cfg);
  } else if (cfg.command == "zalduendo-check") {
    r.records = cmd_zalduendo(cfg);
  } else {
    r.records = cmd_sweep(cfg);
  }
  if (cfg.timing && cfg.command != "sweep") {
    const double total = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    for (auto& rec : r.records) {
      rec.wall_time_s = total / static_cast<double>(r.records.size());
    }
  }
  for (const auto& rec : r.records) {
    if (!rec.pass()) r.exit_code = kExitCheckFailed;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  if (cfg.command == "sweep") {
    j["k_grid"] = cfg.k_grid;
    j["p_grid"] = cfg.p_grid;
    j["n_grid"] = cfg.n_grid;
  } else {
    j["k"] = cfg.k;
    j["p"] = cfg.p;
    j["n"] = cfg.n;
  }
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  if (cfg.command == "verify-rademacher") j["depth"] = cfg.depth;
  j["restarts"] = cfg.restarts;
  j["iters"] = cfg.iters;
  if (cfg.coeffs) j["coeffs"] = coefficients_to_json(*cfg.coeffs);
  if (cfg.off_diagonal != 0.0) j["off_diagonal"] = cfg.off_diagonal;
  Json tol;
  for (const auto& [name, v] : cfg.tol) tol[name] = v;
  j["tol"] = tol;
  j["format"] = cfg.format == Format::json ? "json" : "csv";
  j["workers"] = cfg.workers;
  if (cfg.inject_fault) j["inject_fault"] = true;
  return j;
}

inline Json record_to_json(const ResultRecord& rec, std::size_t index) {
  Json j;
  j["index"] = index;
  j["command"] = rec.command;
  j["parameters"] = rec.parameters;
  Json values = Json::object();
  for (const auto& [name, v] : rec.values) values[name] = json_real(v);
  j["values"] = values;
  Json checks = Json::array();
  for (const auto& c : rec.checks) {
    Json cj;
    cj["name"] = c.name;
    cj["deviation"] = json_real(c.deviation);
    cj["tolerance"] = c.tolerance;
    cj["pass"] = c.pass();
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["pass"] = rec.pass();
  if (!rec.note.empty()) j["note"] = rec.note;
  if (rec.wall_time_s) j["wall_time_s"] = *rec.wall_time_s;
  return j;
}

inline Json summary_json(const RunResult& r) {
  std::size_t passed = 0;
  for (const auto& rec : r.records) passed += rec.pass() ? 1 : 0;
  Json s;
  s["records"] = r.records.size();
  s["passed"] = passed;
  s["failed"] = r.records.size() - passed;
  s["status"] = r.exit_code == kExitOk ? "pass" : "fail";
  s["exit_code"] = r.exit_code;
  return s;
}

inline std::string to_json(const ExperimentConfig& cfg, const RunResult& r) {
  Json j;
  j["tool"] = "orthoadd";
  j["config"] = config_to_json(cfg);
  Json recs = Json::array();
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    recs.push_back(record_to_json(r.records[i], i));
  }
  j["records"] = recs;
  j["summary"] = summary_json(r);
  return j.dump(2) + "\n";
}

inline std::string csv_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

/// One row per value and per check.
inline std::string to_csv(const RunResult& r) {
  std::string out = "record,command,parameters,kind,name,value,tolerance,pass\n";
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& rec = r.records[i];
    const std::string head = std::to_string(i) + "," + rec.command + "," +
                             csv_quote(rec.parameters.dump()) + ",";
    for (const auto& [name, v] : rec.values) {
      out += head + "value," + name + "," + format_real(v) + ",,\n";
    }
    for (const auto& c : rec.checks) {
      out += head + "check," + c.name + "," + format_real(c.deviation) + "," +
             format_real(c.tolerance) + "," + (c.pass() ? "true" : "false") +
             "\n";
    }
  }
  return out;
}

inline std::string serialize(const ExperimentConfig& cfg, const RunResult& r) {
  return cfg.format == Format::json ? to_json(cfg, r) : to_csv(r);
}

/// Applies the keys of a JSON config object onto cfg.
inline void apply_json_config(const Json& j, ExperimentConfig& cfg) {
  if (!j.is_object()) throw InvalidArgument("config file must hold an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") cfg.command = v.get<std::string>();
      else if (key == "k") cfg.k = v.get<int>();
      else if (key == "p") cfg.p = v.get<double>();
      else if (key == "n") cfg.n = v.get<int>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "trials") cfg.trials = v.get<int>();
      else if (key == "depth") cfg.depth = v.get<int>();
      else if (key == "restarts") cfg.restarts = v.get<int>();
      else if (key == "iters") cfg.iters = v.get<int>();
      else if (key == "coeffs") cfg.coeffs = coefficients_from_json(v);
      else if (key == "off_diagonal") cfg.off_diagonal = v.get<double>();
      else if (key == "tol") {
        for (const auto& [name, t] : v.items()) cfg.tol[name] = t.get<double>();
      } else if (key == "format") {
        const auto f = v.get<std::string>();
        if (f != "json" && f != "csv") throw InvalidArgument("format: " + f);
        cfg.format = f == "json" ? Format::json : Format::csv;
      } else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "workers") cfg.workers = v.get<int>();
      else if (key == "timing") cfg.timing = v.get<bool>();
      else if (key == "inject_fault") cfg.inject_fault = v.get<bool>();
      else if (key == "k_grid") cfg.k_grid = v.get<std::vector<int>>();
      else if (key == "p_grid") {
        cfg.p_grid.clear();
        for (const auto& e : v) {
          cfg.p_grid.push_back(e.is_string() ? e.get<std::string>()
                                             : format_real(e.get<double>()));
        }
      } else if (key == "n_grid") cfg.n_grid = v.get<std::vector<int>>();
      else throw InvalidArgument("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config file: ") + e.what());
  }
}

}  // namespace orthoadd::experiment
