// Command-line harness for the hybrid-control gradient-flow experiments.
//
// Subcommands:
//   simulate  continuous hybrid runs from a config
//   discrete  forward-Euler hybrid runs
//   baseline  reference methods (nwr / nsr / ngr / gd)
//   validate  feasibility checks only
//   zeno      analytic inter-jump bounds only
//   compare   every configured method plus a summary
//
// Exit codes: 0 success, 2 config error, 3 infeasible parameters,
// 4 runtime failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hybridgrad/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> t_end;
  std::optional<int> k_max;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_out) {
  cmd->add_option("--config,-c", opts.config_path, "experiment config (JSON)")
      ->required();
  if (needs_out)
    cmd->add_option("--out,-o", opts.out_dir, "output directory");
  cmd->add_option("--seed", [&opts](const CLI::results_t& r) {
        opts.seed = std::stoull(r[0]);
        return true;
      },
      "override the problem seed");
  cmd->add_option("--t-end", [&opts](const CLI::results_t& r) {
        opts.t_end = std::stod(r[0]);
        return true;
      },
      "override the continuous horizon");
  cmd->add_option("--k-max", [&opts](const CLI::results_t& r) {
        opts.k_max = std::stoi(r[0]);
        return true;
      },
      "override the iteration budget");
  cmd->add_flag("--quiet,-q", opts.quiet, "suppress per-run progress lines");
}

hybridgrad::ExperimentConfig load(const CommonOpts& opts) {
  auto cfg = hybridgrad::load_config(opts.config_path, opts.seed);
  if (opts.t_end) cfg.t_end = *opts.t_end;
  if (opts.k_max) cfg.k_max = *opts.k_max;
  return cfg;
}

int run_kinds(const CommonOpts& opts, const std::vector<std::string>& kinds) {
  const auto cfg = load(opts);
  hybridgrad::run_config(cfg, opts.out_dir, kinds, opts.quiet);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"state-dependent hybrid gradient-flow experiment harness"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto* sim = app.add_subcommand("simulate", "run continuous hybrid methods");
  add_common(sim, opts, true);
  auto* disc = app.add_subcommand("discrete", "run forward-Euler hybrid methods");
  add_common(disc, opts, true);
  auto* base = app.add_subcommand("baseline", "run baseline methods");
  add_common(base, opts, true);
  auto* val = app.add_subcommand("validate", "check feasibility conditions");
  add_common(val, opts, false);
  auto* zeno = app.add_subcommand("zeno", "print analytic inter-jump bounds");
  add_common(zeno, opts, false);
  auto* cmp = app.add_subcommand("compare", "run everything and summarize");
  add_common(cmp, opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_kinds(opts, {"hybrid"});
    if (disc->parsed()) return run_kinds(opts, {"discrete"});
    if (base->parsed()) return run_kinds(opts, {"baseline"});
    if (cmp->parsed()) return run_kinds(opts, {});
    if (val->parsed()) {
      const auto cfg = load(opts);
      bool all_ok = true;
      for (const auto& [name, violations] : hybridgrad::validate_config(cfg)) {
        if (violations.empty()) {
          if (!opts.quiet) std::cout << name << ": feasible\n";
        } else {
          all_ok = false;
          std::cout << name << ": infeasible\n";
          for (const auto& v : violations)
            std::cout << "  " << v.condition << ": " << v.detail << "\n";
        }
      }
      return all_ok ? 0 : 3;
    }
    if (zeno->parsed()) {
      const auto cfg = load(opts);
      std::cout << hybridgrad::zeno_report(cfg).dump(2) << "\n";
      return 0;
    }
  } catch (const hybridgrad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hybridgrad::InfeasibleParams& e) {
    std::cerr << "infeasible parameters:\n" << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
