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
/// Command-line front end for the experiment runner.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "orthoadd/experiment.hpp"

namespace orthoadd::cli {

namespace ex = orthoadd::experiment;

/// Directory used for output when --out is not given.
inline constexpr const char* kOutputDirEnv = "ORTHOADD_OUTPUT_DIR";

inline constexpr std::pair<const char*, const char*> kCommands[] = {
    {"verify-rademacher", "exact integrals of Rademacher-function products"},
    {"pi-norm", "projective norm of a diagonal tensor: bounds vs closed form"},
    {"oa-norm", "norm of sum c_n x_n^k: closed form, witness, ascent"},
    {"additivity-test", "structural and behavioral orthogonal additivity"},
    {"zalduendo-check", "diagonal of random symmetric forms vs form norm"},
    {"sweep", "all suites over a (k, p, n) grid of random instances"}};

/// Raw flag values; only the flags actually given override the config file.
struct Flags {
  std::string k, p, n;
  std::uint64_t seed = 0;
  int trials = 1, depth = 3, restarts = 20, iters = 500, workers = 1;
  std::string coeffs, input, config, out, format;
  std::vector<std::string> tol;
  double off_diagonal = 0.0;
  bool timing = false, inject_fault = false;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ex::trim(item));
  return out;
}

inline int parse_int(const std::string& s, const std::string& what) {
  const double v = ex::parse_real(s, what);
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw InvalidArgument(what + " must be an integer: '" + s + "'");
  }
  return static_cast<int>(v);
}

inline ex::Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return ex::Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

struct Parsed {
  ex::ExperimentConfig config;
  bool help = false;
  std::string help_text;
};

/// Parses argv into a configuration. Throws InvalidArgument on bad input.
inline Parsed parse(int argc, const char* const* argv) {
  CLI::App app{"Verification runner for orthogonally additive polynomials "
               "and tensor diagonals on l_p"};
  app.require_subcommand(1);
  Flags f;
  std::vector<CLI::App*> subs;
  for (const auto& [name, description] : kCommands) {
    auto* sub = app.add_subcommand(name, description);
    subs.push_back(sub);
    sub->add_option("--k", f.k, "polynomial degree (sweep: comma list)");
    sub->add_option("--p", f.p,
                    "sequence-space exponent (sweep: list of expressions "
                    "such as k+1,2k)");
    sub->add_option("--n", f.n, "dimension (sweep: comma list)");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--trials", f.trials, "random instances per case");
    sub->add_option("--tol", f.tol, "tolerance override <name>=<value>");
    sub->add_option("--out", f.out, "output path (default: stdout or $" +
                                        std::string(kOutputDirEnv) + ")");
    sub->add_option("--format", f.format, "json or csv");
    sub->add_option("--workers", f.workers, "worker threads");
    sub->add_option("--config", f.config, "JSON config file; flags win");
    sub->add_flag("--timing", f.timing, "record wall time per record");
    sub->add_option("--restarts", f.restarts, "ascent restarts");
    sub->add_option("--iters", f.iters, "ascent iterations per restart");
    if (std::string(name) == "verify-rademacher") {
      sub->add_option("--depth", f.depth, "largest level");
    }
    if (std::string(name) == "pi-norm" || std::string(name) == "oa-norm" ||
        std::string(name) == "additivity-test") {
      sub->add_option("--coeffs", f.coeffs,
                      "comma-separated coefficients, e.g. 1,-2,3+4i");
      sub->add_option("--input", f.input, "JSON file with a \"coeffs\" array");
    }
    if (std::string(name) == "additivity-test") {
      sub->add_option("--off-diagonal", f.off_diagonal,
                      "inject a symmetric off-diagonal coefficient");
    }
    if (std::string(name) == "sweep" || std::string(name) == "pi-norm") {
      sub->add_flag("--inject-fault", f.inject_fault,
                    "perturb the first closed-form value (test fixture)");
    }
  }

  Parsed out;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out.help = true;
    out.help_text = app.help();
    return out;
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(e.what());
  }

  CLI::App* sub = nullptr;
  for (auto* s : subs) {
    if (s->parsed()) sub = s;
  }
  auto given = [&](const char* opt) { return sub->count(opt) > 0; };

  ex::ExperimentConfig& cfg = out.config;
  if (given("--config")) ex::apply_json_config(read_json_file(f.config), cfg);
  cfg.command = sub->get_name();
  const bool sweep = cfg.command == "sweep";

  if (given("--k")) {
    if (sweep) {
      cfg.k_grid.clear();
      for (const auto& s : split_list(f.k)) cfg.k_grid.push_back(parse_int(s, "k"));
    } else {
      cfg.k = parse_int(f.k, "k");
    }
  }
  if (given("--p")) {
    if (sweep) cfg.p_grid = split_list(f.p);
    else cfg.p = ex::parse_real(f.p, "p");
  }
  if (given("--n")) {
    if (sweep) {
      cfg.n_grid.clear();
      for (const auto& s : split_list(f.n)) cfg.n_grid.push_back(parse_int(s, "n"));
    } else {
      cfg.n = parse_int(f.n, "n");
    }
  }
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--trials")) cfg.trials = f.trials;
  if (given("--workers")) cfg.workers = f.workers;
  if (given("--restarts")) cfg.restarts = f.restarts;
  if (given("--iters")) cfg.iters = f.iters;
  if (given("--timing")) cfg.timing = f.timing;
  if (given("--out")) cfg.out = f.out;
  if (cfg.command == "verify-rademacher" && given("--depth")) cfg.depth = f.depth;
  if (sub->get_option_no_throw("--coeffs") && given("--coeffs")) {
    cfg.coeffs = ex::parse_coefficients(f.coeffs);
  }
  if (sub->get_option_no_throw("--input") && given("--input")) {
    const auto j = read_json_file(f.input);
    if (!j.is_object() || !j.contains("coeffs")) {
      throw InvalidArgument(f.input + ": expected an object with \"coeffs\"");
    }
    cfg.coeffs = ex::coefficients_from_json(j["coeffs"]);
  }
  if (sub->get_option_no_throw("--off-diagonal") && given("--off-diagonal")) {
    cfg.off_diagonal = f.off_diagonal;
  }
  if (sub->get_option_no_throw("--inject-fault") && given("--inject-fault")) {
    cfg.inject_fault = f.inject_fault;
  }
  if (given("--format")) {
    if (f.format == "json") cfg.format = ex::Format::json;
    else if (f.format == "csv") cfg.format = ex::Format::csv;
    else throw InvalidArgument("--format must be json or csv");
  }
  for (const auto& t : f.tol) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("--tol expects <name>=<value>, got '" + t + "'");
    }
    const std::string name = ex::trim(t.substr(0, eq));
    if (!ex::default_tolerances().count(name)) {
      throw InvalidArgument("unknown tolerance name: " + name);
    }
    cfg.tol[name] = ex::parse_real(t.substr(eq + 1), "tolerance " + name);
  }
  if (cfg.coeffs) cfg.n = static_cast<int>(cfg.coeffs->size());
  return out;
}

/// Output path: --out, else $ORTHOADD_OUTPUT_DIR/<command>.<format>, else
/// empty for stdout.
inline std::string output_path(const ex::ExperimentConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
    const auto ext = cfg.format == ex::Format::json ? ".json" : ".csv";
    return (std::filesystem::path(dir) / (cfg.command + ext)).string();
  }
  return "";
}

/// Full CLI run; returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err) {
  try {
    const Parsed parsed = parse(argc, argv);
    if (parsed.help) {
      out << parsed.help_text;
      return ex::kExitOk;
    }
    const auto& cfg = parsed.config;
    const ex::RunResult result = ex::run(cfg);
    const std::string text = ex::serialize(cfg, result);
    const std::string path = output_path(cfg);
    if (path.empty()) {
      out << text;
    } else {
      std::ofstream file(path, std::ios::binary);
      if (!file) throw InvalidArgument("cannot write " + path);
      file << text;
    }
    std::size_t failed = 0;
    for (const auto& r : result.records) failed += r.pass() ? 0 : 1;
    err << cfg.command << ": " << result.records.size() << " records, "
        << failed << " failed\n";
    return result.exit_code;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return ex::kExitInvalidConfig;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return ex::kExitBudgetExceeded;
  }
}

}  // namespace orthoadd::cli
