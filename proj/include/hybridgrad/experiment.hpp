#ifndef HYBRIDGRAD_EXPERIMENT_HPP
#define HYBRIDGRAD_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "json.hpp"

#include "hybridgrad/baselines.hpp"
#include "hybridgrad/discrete_solver.hpp"
#include "hybridgrad/hybrid_integrator.hpp"
#include "hybridgrad/problem.hpp"

namespace hybridgrad {

/// The configuration document is malformed (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configured method fails its feasibility conditions (CLI exit code 3).
struct InfeasibleParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RateEstimate {
  double rate;        // fitted decay exponent per unit of the abscissa
  std::size_t first;  // index range of the fitted samples in the input series
  std::size_t last;
  double residual;    // RMS residual of the log-linear fit
};

/// Least-squares slope of log(gap) over the trailing `window_fraction` of the
/// samples whose gap exceeds `gap_floor`. Returns the negated slope. Absent
/// when fewer than 10 samples qualify.
std::optional<RateEstimate> estimate_rate(
    const std::vector<std::pair<double, double>>& series,
    double window_fraction, double gap_floor);

struct MethodSpec {
  std::string name;
  std::string kind;  // "hybrid" | "discrete" | "baseline"
  nlohmann::json spec;
};

struct ExperimentConfig {
  nlohmann::json problem_spec;  // as given, with any seed override applied
  Problem problem;
  Vector x1_0;
  double t_end = 25.0;
  int k_max = 200;
  IntegratorSettings integrator;
  std::vector<MethodSpec> methods;
};

/// Builds a Problem from its JSON description
/// (kind lmse | quadratic | logistic, plus optional "constants" overrides).
Problem build_problem(const nlohmann::json& spec);

ExperimentConfig parse_config(const nlohmann::json& doc,
                              std::optional<std::uint64_t> seed_override);

/// Reads and parses a config file; parse errors are reported with the line
/// number of the offending byte.
ExperimentConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override);

/// Feasibility check of every hybrid/discrete method against the problem's
/// constants. Returns (method name, violations) pairs; all empty = feasible.
std::vector<std::pair<std::string, std::vector<ConditionViolation>>>
validate_config(const ExperimentConfig& config);

/// Analytic inter-jump bounds for every hybrid method, evaluated at the
/// configured initial point.
nlohmann::ordered_json zeno_report(const ExperimentConfig& config);

/// Runs every configured method whose kind is in `kinds` (empty = all) after
/// validating all of them, writes one CSV and one metadata JSON per run plus a
/// summary JSON under out_dir, and returns the summary. Deterministic:
/// identical configs produce byte-identical artifacts.
nlohmann::ordered_json run_config(const ExperimentConfig& config,
                                  const std::string& out_dir,
                                  const std::vector<std::string>& kinds = {},
                                  bool quiet = false);

}  // namespace hybridgrad

#endif  // HYBRIDGRAD_EXPERIMENT_HPP
