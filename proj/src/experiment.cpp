#include "hybridgrad/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "hybridgrad/record_io.hpp"

namespace hybridgrad {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double require_number(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(std::string(ctx) + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError(std::string("field '") + key + "' must be numeric");
  return j[key].get<double>();
}

Matrix parse_matrix(const json& j, const char* ctx) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError(std::string(ctx) + ": expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw ConfigError(std::string(ctx) + ": ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Vector parse_vector(const json& j, const char* ctx) {
  if (!j.is_array())
    throw ConfigError(std::string(ctx) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

ControlStructure parse_structure(const json& j, const char* ctx) {
  const std::string s = j.value("structure", "");
  if (s == "damping") return ControlStructure::Damping;
  if (s == "potential") return ControlStructure::Potential;
  throw ConfigError(std::string(ctx) +
                    ": 'structure' must be \"damping\" or \"potential\"");
}

HybridParams parse_hybrid_params(const json& j, const char* ctx) {
  HybridParams p;
  p.alpha = require_number(j, "alpha", ctx);
  p.beta = require_number(j, "beta", ctx);
  p.u_lo = require_number(j, "u_lo", ctx);
  p.u_hi = require_number(j, "u_hi", ctx);
  return p;
}

DiscreteParams parse_discrete_params(const json& j, const Problem& problem,
                                     const char* ctx) {
  if (j.value("corollary", false)) {
    const double s = number_or(j, "s", 1.0 / problem.constants.L_f);
    return corollary1_params(problem.constants.L_f, s);
  }
  DiscreteParams p;
  p.s = require_number(j, "s", ctx);
  p.c1 = require_number(j, "c1", ctx);
  p.c2 = require_number(j, "c2", ctx);
  p.beta = require_number(j, "beta", ctx);
  return p;
}

ordered_json constants_json(const Constants& c) {
  ordered_json j;
  j["L_f"] = c.L_f;
  j["ell_f"] = c.ell_f;
  j["mu_f"] = c.mu_f;
  j["H_f"] = c.H_f;
  if (c.f_star) j["f_star"] = *c.f_star;
  return j;
}

ordered_json settings_json(const IntegratorSettings& s) {
  ordered_json j;
  j["rel_tol"] = s.rel_tol;
  j["abs_tol"] = s.abs_tol;
  j["max_step"] = s.max_step;
  j["min_step"] = s.min_step;
  j["event_time_tol"] = s.event_time_tol;
  j["gtol"] = s.gtol;
  j["sample_interval"] = s.sample_interval;
  return j;
}

ordered_json rate_json(const std::optional<RateEstimate>& r) {
  if (!r) return nullptr;
  ordered_json j;
  j["rate"] = r->rate;
  j["first"] = r->first;
  j["last"] = r->last;
  j["residual"] = r->residual;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

}  // namespace

std::optional<RateEstimate> estimate_rate(
    const std::vector<std::pair<double, double>>& series,
    double window_fraction, double gap_floor) {
  if (window_fraction <= 0.0 || window_fraction > 1.0)
    throw std::invalid_argument("estimate_rate: window fraction in (0,1]");

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double gap = series[i].second;
    if (std::isfinite(gap) && gap > gap_floor) usable.push_back(i);
  }
  const std::size_t start =
      usable.size() -
      std::min(usable.size(),
               std::max<std::size_t>(
                   10, static_cast<std::size_t>(
                           std::ceil(window_fraction *
                                     static_cast<double>(usable.size())))));
  const std::size_t count = usable.size() - start;
  if (count < 10) return std::nullopt;

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = start; i < usable.size(); ++i) {
    const double t = series[usable[i]].first;
    const double y = std::log(series[usable[i]].second);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double nf = static_cast<double>(count);
  const double denom = nf * stt - st * st;
  if (denom <= 0.0) return std::nullopt;
  const double slope = (nf * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / nf;

  double ss = 0.0;
  for (std::size_t i = start; i < usable.size(); ++i) {
    const double t = series[usable[i]].first;
    const double y = std::log(series[usable[i]].second);
    const double r = y - (slope * t + intercept);
    ss += r * r;
  }
  return RateEstimate{-slope, usable[start], usable.back(),
                      std::sqrt(ss / nf)};
}

Problem build_problem(const json& spec) {
  const std::string kind = spec.value("kind", "");
  Problem p;
  if (kind == "lmse") {
    if (spec.contains("A")) {
      p = make_lmse(parse_matrix(spec["A"], "problem.A"),
                    parse_vector(spec["b"], "problem.b"));
    } else {
      const auto rows = static_cast<Eigen::Index>(
          require_number(spec, "rows", "problem"));
      const auto cols = static_cast<Eigen::Index>(
          require_number(spec, "cols", "problem"));
      const auto seed =
          static_cast<std::uint64_t>(require_number(spec, "seed", "problem"));
      p = make_lmse(rows, cols, seed);
    }
  } else if (kind == "quadratic") {
    Matrix Q;
    if (spec.contains("q_diag")) {
      const Vector d = parse_vector(spec["q_diag"], "problem.q_diag");
      Q = d.asDiagonal();
    } else {
      Q = parse_matrix(spec.at("Q"), "problem.Q");
    }
    Vector c = spec.contains("c") ? parse_vector(spec["c"], "problem.c")
                                  : Vector(Vector::Zero(Q.rows()));
    p = make_quadratic(Q, c);
  } else if (kind == "logistic") {
    p = make_logistic(parse_matrix(spec.at("features"), "problem.features"),
                      parse_vector(spec.at("labels"), "problem.labels"),
                      number_or(spec, "box_radius", 1.0),
                      require_number(spec, "mu_f", "problem"));
  } else {
    throw ConfigError("problem.kind must be lmse, quadratic or logistic");
  }

  if (spec.contains("constants")) {
    const json& c = spec["constants"];
    p.constants.L_f = number_or(c, "L_f", p.constants.L_f);
    p.constants.ell_f = number_or(c, "ell_f", p.constants.ell_f);
    p.constants.mu_f = number_or(c, "mu_f", p.constants.mu_f);
    p.constants.H_f = number_or(c, "H_f", p.constants.H_f);
    if (c.contains("f_star")) p.constants.f_star = c["f_star"].get<double>();
  }
  return p;
}

ExperimentConfig parse_config(const json& doc,
                              std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  if (!doc.contains("problem")) throw ConfigError("config: missing 'problem'");

  ExperimentConfig cfg;
  cfg.problem_spec = doc["problem"];
  if (seed_override) cfg.problem_spec["seed"] = *seed_override;
  cfg.problem = build_problem(cfg.problem_spec);

  cfg.x1_0 = doc.contains("x1_0")
                 ? parse_vector(doc["x1_0"], "x1_0")
                 : Vector(Vector::Ones(cfg.problem.dim));
  if (cfg.x1_0.size() != cfg.problem.dim)
    throw ConfigError("x1_0 dimension does not match the problem");

  cfg.t_end = number_or(doc, "t_end", 25.0);
  cfg.k_max = static_cast<int>(number_or(doc, "k_max", 200.0));

  if (doc.contains("integrator")) {
    const json& s = doc["integrator"];
    cfg.integrator.rel_tol = number_or(s, "rel_tol", cfg.integrator.rel_tol);
    cfg.integrator.abs_tol = number_or(s, "abs_tol", cfg.integrator.abs_tol);
    cfg.integrator.max_step = number_or(s, "max_step", cfg.integrator.max_step);
    cfg.integrator.min_step = number_or(s, "min_step", cfg.integrator.min_step);
    cfg.integrator.event_time_tol =
        number_or(s, "event_time_tol", cfg.integrator.event_time_tol);
    cfg.integrator.gtol = number_or(s, "gtol", cfg.integrator.gtol);
    cfg.integrator.sample_interval =
        number_or(s, "sample_interval", cfg.integrator.sample_interval);
  }

  std::set<std::string> names;
  if (doc.contains("methods")) {
    if (!doc["methods"].is_array())
      throw ConfigError("'methods' must be an array");
    for (const auto& m : doc["methods"]) {
      MethodSpec ms;
      ms.kind = m.value("kind", "");
      if (ms.kind != "hybrid" && ms.kind != "discrete" && ms.kind != "baseline")
        throw ConfigError("method kind must be hybrid, discrete or baseline");
      ms.name = m.value("name", "");
      if (ms.name.empty()) throw ConfigError("every method needs a 'name'");
      if (!names.insert(ms.name).second)
        throw ConfigError("duplicate method name '" + ms.name + "'");
      ms.spec = m;
      cfg.methods.push_back(std::move(ms));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
  }
  return parse_config(doc, seed_override);
}

std::vector<std::pair<std::string, std::vector<ConditionViolation>>>
validate_config(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::vector<ConditionViolation>>> out;
  for (const auto& m : config.methods) {
    if (m.kind == "hybrid") {
      const auto structure = parse_structure(m.spec, m.name.c_str());
      const auto params = parse_hybrid_params(m.spec, m.name.c_str());
      out.emplace_back(
          m.name, structure == ControlStructure::Damping
                      ? damping::validate_params(params, config.problem.constants)
                      : potential::validate_params(params,
                                                   config.problem.constants));
    } else if (m.kind == "discrete") {
      const auto params =
          parse_discrete_params(m.spec, config.problem, m.name.c_str());
      out.emplace_back(m.name,
                       validate_discrete(params, config.problem.constants));
    }
  }
  return out;
}

nlohmann::ordered_json zeno_report(const ExperimentConfig& config) {
  ordered_json report;
  const double grad_norm0 = config.problem.gradient(config.x1_0).norm();
  report["grad_norm0"] = grad_norm0;
  report["bounds"] = ordered_json::object();
  for (const auto& m : config.methods) {
    if (m.kind != "hybrid") continue;
    const auto structure = parse_structure(m.spec, m.name.c_str());
    const auto params = parse_hybrid_params(m.spec, m.name.c_str());
    ordered_json entry;
    if (structure == ControlStructure::Damping) {
      const auto b =
          damping::zeno_bound(params, config.problem.constants, grad_norm0);
      entry["structure"] = "damping";
      entry["tau_lb"] = b.tau_lb;
      entry["best_r"] = b.best_r;
      entry["uniform"] = false;
      entry["tau_lb_small_gradient_limit"] =
          damping::zeno_bound(params, config.problem.constants, 0.0).tau_lb;
    } else {
      const auto b = potential::zeno_bound(params, config.problem.constants);
      entry["structure"] = "potential";
      entry["tau_lb"] = b.tau_lb;
      entry["best_r"] = b.best_r;
      entry["uniform"] = true;
    }
    report["bounds"][m.name] = entry;
  }
  return report;
}

nlohmann::ordered_json run_config(const ExperimentConfig& config,
                                  const std::string& out_dir,
                                  const std::vector<std::string>& kinds,
                                  bool quiet) {
  const auto selected = [&kinds](const MethodSpec& m) {
    return kinds.empty() ||
           std::find(kinds.begin(), kinds.end(), m.kind) != kinds.end();
  };

  // Every configured method must validate before anything runs.
  std::string infeasible;
  for (const auto& [name, violations] : validate_config(config)) {
    if (violations.empty()) continue;
    if (!infeasible.empty()) infeasible += "\n";
    infeasible += name + ": " + join_violations(violations);
  }
  if (!infeasible.empty()) throw InfeasibleParams(infeasible);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  ordered_json summary;
  summary["problem"] = ordered_json::object();
  summary["problem"]["spec"] = config.problem_spec;
  summary["problem"]["constants"] = constants_json(config.problem.constants);
  summary["t_end"] = config.t_end;
  summary["k_max"] = config.k_max;
  summary["runs"] = ordered_json::object();

  for (const auto& m : config.methods) {
    if (!selected(m)) continue;

    ordered_json meta;
    meta["name"] = m.name;
    meta["kind"] = m.kind;
    meta["method"] = m.spec;
    meta["problem"] = summary["problem"];
    meta["integrator"] = settings_json(config.integrator);

    ordered_json run_summary;
    std::ostringstream csv;

    if (m.kind == "hybrid") {
      const auto structure = parse_structure(m.spec, m.name.c_str());
      const auto params = parse_hybrid_params(m.spec, m.name.c_str());
      const auto record = simulate(config.problem, structure, params,
                                   config.x1_0, config.t_end, config.integrator);
      write_trajectory_csv(record, csv);

      std::vector<std::pair<double, double>> series;
      for (const auto& s : record.samples) series.emplace_back(s.t, s.f_gap);
      const double floor = record.gtol_effective * record.gtol_effective;
      const auto rate = estimate_rate(series, 0.5, floor);

      double min_inter = std::numeric_limits<double>::infinity();
      double min_bound = std::numeric_limits<double>::infinity();
      for (const auto& j : record.jumps) {
        min_inter = std::min(min_inter, j.inter_jump_duration);
        min_bound = std::min(min_bound, j.zeno_lower_bound);
      }
      run_summary["termination"] = to_string(record.termination);
      run_summary["samples"] = record.samples.size();
      run_summary["jump_count"] = record.jumps.size();
      if (!record.jumps.empty()) {
        run_summary["min_inter_jump_duration"] = min_inter;
        run_summary["zeno_bound_min"] = min_bound;
      }
      run_summary["final_gap"] = record.samples.back().f_gap;
      run_summary["alpha_hat"] = rate_json(rate);
      run_summary["gtol_effective"] = record.gtol_effective;
    } else if (m.kind == "discrete") {
      const auto structure = parse_structure(m.spec, m.name.c_str());
      const auto params =
          parse_discrete_params(m.spec, config.problem, m.name.c_str());
      const double alpha = require_number(m.spec, "alpha", m.name.c_str());
      const double gtol =
          config.integrator.gtol *
          (1.0 + config.problem.gradient(config.x1_0).norm());
      const auto run = run_algorithm1(config.problem, structure, params, alpha,
                                      config.x1_0, config.k_max, gtol);
      write_discrete_csv(run, csv);

      std::vector<std::pair<double, double>> series;
      int flow_steps = 0;
      double max_ratio = 0.0;
      for (const auto& it : run.iterates) {
        series.emplace_back(static_cast<double>(it.k), it.f_gap);
        if (it.k > 0 && it.mode == DiscreteMode::Flow) {
          ++flow_steps;
          max_ratio = std::max(max_ratio, it.per_step_ratio);
        }
      }
      const auto rate = estimate_rate(series, 0.5, gtol * gtol);
      run_summary["termination"] = to_string(run.termination);
      run_summary["iterations"] = run.iterates.size() - 1;
      run_summary["flow_steps"] = flow_steps;
      run_summary["max_flow_ratio"] = max_ratio;
      run_summary["lambda_guaranteed"] =
          lambda_rate(params.s, params.c1, params.c2,
                      config.problem.constants.mu_f, config.problem.constants.L_f);
      run_summary["final_gap"] = run.iterates.back().f_gap;
      if (rate) {
        ordered_json lj = rate_json(rate);
        lj["lambda_hat"] = std::exp(-rate->rate);
        run_summary["lambda_hat"] = lj;
      } else {
        run_summary["lambda_hat"] = nullptr;
      }
      meta["params"] = ordered_json{{"s", params.s},
                                    {"c1", params.c1},
                                    {"c2", params.c2},
                                    {"beta", params.beta}};
    } else {
      const std::string method = m.spec.value("method", "");
      const double t_start = number_or(m.spec, "t_start", 1.0);
      const double step =
          number_or(m.spec, "step", 1.0 / config.problem.constants.L_f);
      const double gtol =
          config.integrator.gtol *
          (1.0 + config.problem.gradient(config.x1_0).norm());
      BaselineRun run;
      if (method == "nwr") {
        run = nwr_ode(config.problem, config.x1_0, t_start, config.t_end,
                      config.integrator);
      } else if (method == "nsr") {
        run = nsr_speed_restart(config.problem, config.x1_0, t_start,
                                config.t_end, config.integrator,
                                number_or(m.spec, "restart_threshold", 0.0));
      } else if (method == "ngr") {
        run = ngr_discrete(config.problem, config.x1_0, step, config.k_max,
                           gtol);
      } else if (method == "gd") {
        run = gd(config.problem, config.x1_0, step, config.k_max, gtol);
      } else {
        throw ConfigError(m.name + ": baseline method must be nwr, nsr, ngr or gd");
      }
      write_baseline_csv(run, csv);

      std::vector<std::pair<double, double>> series;
      int restarts = 0;
      for (const auto& s : run.samples) {
        series.emplace_back(s.t, s.f_gap);
        if (s.restart_flag) ++restarts;
      }
      const auto rate = estimate_rate(series, 0.5, gtol * gtol);
      run_summary["termination"] = to_string(run.termination);
      run_summary["samples"] = run.samples.size();
      run_summary["restarts"] = restarts;
      run_summary["final_gap"] = run.samples.back().f_gap;
      run_summary["rate_hat"] = rate_json(rate);
    }

    write_file(dir / (m.name + ".csv"), csv.str());
    meta["summary"] = run_summary;
    write_file(dir / (m.name + ".meta.json"), meta.dump(2) + "\n");
    summary["runs"][m.name] = run_summary;
    if (!quiet)
      std::cout << m.name << ": "
                << run_summary["termination"].get<std::string>() << "\n";
  }

  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace hybridgrad
