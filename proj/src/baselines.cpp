#include "hybridgrad/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybridgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double gap_of(const Problem& problem, const Vector& x) {
  return problem.constants.f_star ? problem.value(x) - *problem.constants.f_star
                                  : kNaN;
}

// Shared core of nwr_ode / nsr_speed_restart. `restart_threshold` empty means
// the speed guard is never evaluated. The damping clock `tau` restarts to
// t_start on a restart; absolute time keeps running.
BaselineRun run_vanishing_damping(const Problem& problem, const Vector& x1_0,
                                  double t_start, double t_end,
                                  const IntegratorSettings& settings,
                                  std::optional<double> restart_threshold,
                                  const char* tag) {
  if (t_start <= 0.0)
    throw std::invalid_argument("vanishing damping: t_start must be positive");
  if (t_end <= t_start)
    throw std::invalid_argument("vanishing damping: t_end must exceed t_start");

  const Eigen::Index n = problem.dim;
  const OdeRhs rhs = [n, &problem](double tau, const Vector& y, Vector& dy) {
    dy.resize(2 * n);
    dy.head(n) = y.tail(n);
    dy.tail(n) = -problem.gradient(y.head(n)) - (3.0 / tau) * y.tail(n);
  };
  // 0.5 d|V|^2/dt along the flow; the restart guard.
  const auto speed_rate = [n, &problem](double tau, const Vector& y) {
    const Vector v = y.tail(n);
    return v.dot(Vector(-problem.gradient(y.head(n)) - (3.0 / tau) * v));
  };

  BaselineRun run;
  run.method = tag;
  const double gtol_eff =
      settings.gtol * (1.0 + problem.gradient(x1_0).norm());

  Vector y(2 * n);
  y.head(n) = x1_0;
  y.tail(n).setZero();
  double tau = t_start;       // damping clock
  double offset = 0.0;        // absolute time = offset + tau
  bool armed = false;         // speed has been observed increasing

  run.samples.push_back(BaselineSample{t_start, gap_of(problem, x1_0), false});
  double next_sample_t = t_start + settings.sample_interval;
  double h = std::min(settings.max_step, 1e-3);
  const double t_edge = std::max(settings.min_step, 1e-14 * t_end);
  run.termination = Termination::TimeLimit;

  while (true) {
    const double t_abs = offset + tau;
    if (t_end - t_abs <= t_edge) break;
    if (problem.gradient(y.head(n)).norm() <= gtol_eff) {
      run.termination = Termination::Converged;
      break;
    }

    const RkStepResult step =
        rk45_step(rhs, tau, y, std::min(h, t_end - t_abs), settings.rel_tol,
                  settings.abs_tol, settings.min_step, settings.max_step);
    if (!step.accepted) {
      run.termination = Termination::GuardStuck;
      break;
    }

    bool restarted = false;
    if (restart_threshold) {
      const double rate_new = speed_rate(step.t, step.y);
      if (!armed && rate_new > 0.0) armed = true;
      if (armed && rate_new <= *restart_threshold) {
        // Bisection for the crossing time of the speed guard.
        double lo = 0.0, hi = step.t - tau;
        Vector y_mid;
        while (hi - lo > settings.event_time_tol) {
          const double mid = 0.5 * (lo + hi);
          rk45_fixed_step(rhs, tau, y, mid, y_mid);
          if (speed_rate(tau + mid, y_mid) > *restart_threshold)
            lo = mid;
          else
            hi = mid;
        }
        Vector y_cross;
        if (lo == 0.0)
          y_cross = y;
        else
          rk45_fixed_step(rhs, tau, y, lo, y_cross);
        const double t_cross = offset + tau + lo;

        y.head(n) = y_cross.head(n);
        y.tail(n).setZero();
        offset = t_cross - t_start;
        tau = t_start;
        armed = false;
        restarted = true;
        run.samples.push_back(
            BaselineSample{t_cross, gap_of(problem, y.head(n)), true});
        next_sample_t =
            settings.sample_interval *
                (std::floor(t_cross / settings.sample_interval) + 1.0);
        h = step.h_next;
      }
    }
    if (restarted) continue;

    y = step.y;
    tau = step.t;
    h = step.h_next;
    const double t_now = offset + tau;
    if (t_now >= next_sample_t) {
      run.samples.push_back(
          BaselineSample{t_now, gap_of(problem, y.head(n)), false});
      next_sample_t = settings.sample_interval *
                      (std::floor(t_now / settings.sample_interval) + 1.0);
    }
  }

  const double t_final = offset + tau;
  if (run.samples.back().t < t_final)
    run.samples.push_back(
        BaselineSample{t_final, gap_of(problem, y.head(n)), false});
  return run;
}

}  // namespace

BaselineRun nwr_ode(const Problem& problem, const Vector& x1_0, double t_start,
                    double t_end, const IntegratorSettings& settings) {
  return run_vanishing_damping(problem, x1_0, t_start, t_end, settings,
                               std::nullopt, "nwr");
}

BaselineRun nsr_speed_restart(const Problem& problem, const Vector& x1_0,
                              double t_start, double t_end,
                              const IntegratorSettings& settings,
                              double restart_threshold) {
  return run_vanishing_damping(problem, x1_0, t_start, t_end, settings,
                               restart_threshold, "nsr");
}

BaselineRun ngr_discrete(const Problem& problem, const Vector& x1_0, double s,
                         int k_max, double gtol) {
  if (s <= 0.0) throw std::invalid_argument("ngr: step must be positive");

  BaselineRun run;
  run.method = "ngr";
  run.termination = Termination::TimeLimit;

  Vector x_prev = x1_0;
  Vector y = x1_0;
  double tk = 1.0;
  run.samples.push_back(BaselineSample{0.0, gap_of(problem, x1_0), false});

  for (int k = 1; k <= k_max; ++k) {
    const Vector gy = problem.gradient(y);
    const Vector x = y - s * gy;
    const bool restart = gy.dot(x - x_prev) > 0.0;
    if (restart) {
      tk = 1.0;
      y = x;
    } else {
      const double tk1 = (1.0 + std::sqrt(1.0 + 4.0 * tk * tk)) / 2.0;
      y = x + ((tk - 1.0) / tk1) * (x - x_prev);
      tk = tk1;
    }
    run.samples.push_back(
        BaselineSample{static_cast<double>(k), gap_of(problem, x), restart});
    if (problem.gradient(x).norm() <= gtol) {
      run.termination = Termination::Converged;
      return run;
    }
    x_prev = x;
  }
  return run;
}

BaselineRun gd(const Problem& problem, const Vector& x1_0, double s, int k_max,
               double gtol) {
  if (s < 0.0) throw std::invalid_argument("gd: step must be nonnegative");

  BaselineRun run;
  run.method = "gd";
  run.termination = Termination::TimeLimit;

  Vector x = x1_0;
  run.samples.push_back(BaselineSample{0.0, gap_of(problem, x), false});
  for (int k = 1; k <= k_max; ++k) {
    x = x - s * problem.gradient(x);
    run.samples.push_back(
        BaselineSample{static_cast<double>(k), gap_of(problem, x), false});
    if (problem.gradient(x).norm() <= gtol) {
      run.termination = Termination::Converged;
      return run;
    }
  }
  return run;
}

}  // namespace hybridgrad
