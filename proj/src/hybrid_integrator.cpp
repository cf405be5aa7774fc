#include "hybridgrad/hybrid_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybridgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights (error estimator).
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct StageWork {
  Vector k1, k2, k3, k4, k5, k6, k7, tmp;
};

void dp_step(const OdeRhs& rhs, double t, const Vector& y, double h,
             StageWork& w, Vector& y_out, Vector& err_out) {
  rhs(t, y, w.k1);
  w.tmp = y + h * (a21 * w.k1);
  rhs(t + c2 * h, w.tmp, w.k2);
  w.tmp = y + h * (a31 * w.k1 + a32 * w.k2);
  rhs(t + c3 * h, w.tmp, w.k3);
  w.tmp = y + h * (a41 * w.k1 + a42 * w.k2 + a43 * w.k3);
  rhs(t + c4 * h, w.tmp, w.k4);
  w.tmp = y + h * (a51 * w.k1 + a52 * w.k2 + a53 * w.k3 + a54 * w.k4);
  rhs(t + c5 * h, w.tmp, w.k5);
  w.tmp = y + h * (a61 * w.k1 + a62 * w.k2 + a63 * w.k3 + a64 * w.k4 + a65 * w.k5);
  rhs(t + h, w.tmp, w.k6);
  y_out = y + h * (b1 * w.k1 + b3 * w.k3 + b4 * w.k4 + b5 * w.k5 + b6 * w.k6);
  rhs(t + h, y_out, w.k7);
  err_out = h * (e1 * w.k1 + e3 * w.k3 + e4 * w.k4 + e5 * w.k5 + e6 * w.k6 +
                 e7 * w.k7);
}

double scaled_error_norm(const Vector& err, const Vector& y, const Vector& y_new,
                         double rel_tol, double abs_tol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc =
        abs_tol + rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
    const double q = err(i) / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

Vector stack(const HybridState& s) {
  Vector y(s.x1.size() + s.x2.size());
  y << s.x1, s.x2;
  return y;
}

HybridState unstack(const Vector& y, double t, Eigen::Index n) {
  return HybridState{y.head(n), y.tail(n), t};
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::TimeLimit: return "TimeLimit";
    case Termination::Converged: return "Converged";
    case Termination::DegenerateDenominator: return "DegenerateDenominator";
    case Termination::GuardStuck: return "GuardStuck";
  }
  return "Unknown";
}

std::optional<double> sigma(const HybridState& state, double alpha,
                            const Problem& problem) {
  if (!problem.constants.f_star) return std::nullopt;
  const double gap = problem.value(state.x1) - *problem.constants.f_star;
  return problem.gradient(state.x1).dot(state.x2) + alpha * gap;
}

OdeRhs make_flow_rhs(ControlStructure structure, const HybridParams& params,
                     const Problem& problem) {
  const Eigen::Index n = problem.dim;
  const double alpha = params.alpha;
  if (structure == ControlStructure::Damping) {
    return [n, alpha, &problem](double, const Vector& y, Vector& dy) {
      const Vector x1 = y.head(n);
      const Vector x2 = y.tail(n);
      const double u = damping::feedback(x1, x2, alpha, problem);
      dy.resize(2 * n);
      dy.head(n) = x2;
      dy.tail(n) = -problem.gradient(x1) - u * x2;
    };
  }
  return [n, alpha, &problem](double, const Vector& y, Vector& dy) {
    const Vector x1 = y.head(n);
    const Vector x2 = y.tail(n);
    dy.resize(2 * n);
    dy.head(n) = x2;
    try {
      const double u = potential::feedback(x1, x2, alpha, problem);
      dy.tail(n) = -x2 - u * problem.gradient(x1);
    } catch (const ZeroGradient&) {
      dy.tail(n) = -x2;  // the control term vanishes with the gradient
    }
  };
}

void rk45_fixed_step(const OdeRhs& rhs, double t, const Vector& y, double h,
                     Vector& y_out) {
  StageWork w;
  Vector err;
  dp_step(rhs, t, y, h, w, y_out, err);
}

RkStepResult rk45_step(const OdeRhs& rhs, double t, const Vector& y, double h,
                       double rel_tol, double abs_tol, double min_step,
                       double max_step) {
  StageWork w;
  Vector y_new, err;
  h = std::min(std::abs(h), max_step);

  while (true) {
    if (h < min_step)
      return RkStepResult{y, t, false, kNaN, h, h};
    dp_step(rhs, t, y, h, w, y_new, err);
    const double err_norm = scaled_error_norm(err, y, y_new, rel_tol, abs_tol);
    if (std::isfinite(err_norm) && err_norm <= 1.0) {
      double fac = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, 5.0);
      const double h_next = std::min(h * fac, max_step);
      return RkStepResult{y_new, t + h, true, err_norm, h, h_next};
    }
    double fac = std::isfinite(err_norm) ? 0.9 * std::pow(err_norm, -0.2) : 0.2;
    fac = std::clamp(fac, 0.2, 0.9);
    h *= fac;
  }
}

StepOutcome step_flow(const HybridState& state, ControlStructure structure,
                      const HybridParams& params, const Problem& problem,
                      const IntegratorSettings& settings, double h_init) {
  const OdeRhs rhs = make_flow_rhs(structure, params, problem);
  const RkStepResult r =
      rk45_step(rhs, state.t, stack(state), h_init, settings.rel_tol,
                settings.abs_tol, settings.min_step, settings.max_step);
  return StepOutcome{unstack(r.y, r.t, problem.dim), r.accepted,
                     r.error_estimate, r.h_used, r.h_next};
}

HybridState locate_crossing(
    const HybridState& inside, const HybridState& outside,
    const std::function<HybridState(const HybridState&, double)>& advance,
    const std::function<double(const HybridState&)>& margin,
    double event_time_tol) {
  const double m_in = margin(inside);
  const double m_out = margin(outside);
  if (m_in < 0.0 || m_out >= 0.0)
    throw std::invalid_argument(
        "locate_crossing: states do not bracket the boundary");
  if (m_in == 0.0) return inside;

  double lo = 0.0;  // margin >= 0 at inside.t + lo
  double hi = outside.t - inside.t;
  while (hi - lo > event_time_tol) {
    const double mid = 0.5 * (lo + hi);
    if (margin(advance(inside, mid)) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo == 0.0 ? inside : advance(inside, lo);
}

TrajectoryRecord simulate(const Problem& problem, ControlStructure structure,
                          const HybridParams& params, const Vector& x1_0,
                          double t_end, const IntegratorSettings& settings) {
  if (t_end <= 0.0)
    throw std::invalid_argument("simulate: t_end must be positive");
  const auto violations =
      structure == ControlStructure::Damping
          ? damping::validate_params(params, problem.constants)
          : potential::validate_params(params, problem.constants);
  if (!violations.empty())
    throw std::invalid_argument("simulate: infeasible parameters: " +
                                join_violations(violations));

  const OdeRhs rhs = make_flow_rhs(structure, params, problem);
  const auto margin = [&](const HybridState& s) {
    return structure == ControlStructure::Damping
               ? damping::flow_margin(s, params, problem)
               : potential::flow_margin(s, params, problem);
  };
  const auto advance = [&](const HybridState& s, double dt) {
    Vector y_out;
    rk45_fixed_step(rhs, s.t, stack(s), dt, y_out);
    return unstack(y_out, s.t + dt, problem.dim);
  };
  const auto segment_bound = [&](double grad_norm_at_entry) {
    return structure == ControlStructure::Damping
               ? damping::zeno_bound(params, problem.constants,
                                     grad_norm_at_entry)
                     .tau_lb
               : potential::zeno_bound(params, problem.constants).tau_lb;
  };

  TrajectoryRecord record;
  const Vector g0 = problem.gradient(x1_0);
  record.gtol_effective = settings.gtol * (1.0 + g0.norm());

  const auto push_sample = [&](const HybridState& s, bool jump_flag) {
    TrajectorySample sample;
    sample.t = s.t;
    sample.grad_norm = problem.gradient(s.x1).norm();
    sample.x2_norm = s.x2.norm();
    sample.jump_flag = jump_flag;
    if (problem.constants.f_star) {
      sample.f_gap = problem.value(s.x1) - *problem.constants.f_star;
      sample.sigma = *sigma(s, params.alpha, problem);
    } else {
      sample.f_gap = kNaN;
      sample.sigma = kNaN;
    }
    try {
      sample.u = structure == ControlStructure::Damping
                     ? damping::feedback(s.x1, s.x2, params.alpha, problem)
                     : potential::feedback(s.x1, s.x2, params.alpha, problem);
    } catch (const std::runtime_error&) {
      sample.u = kNaN;
    }
    record.samples.push_back(sample);
  };

  if (g0.norm() <= record.gtol_effective) {
    push_sample(HybridState{x1_0, Vector::Zero(problem.dim), 0.0}, false);
    record.termination = Termination::Converged;
    return record;
  }

  // Enter through the jump map: the theorems' stated initial condition.
  HybridState state{x1_0, Vector(-params.beta * g0), 0.0};
  double segment_start_t = 0.0;
  double segment_entry_grad = g0.norm();

  if (margin(state) <= 0.0) {
    push_sample(state, false);
    record.termination = Termination::GuardStuck;
    return record;
  }
  push_sample(state, false);

  double next_sample_t = settings.sample_interval;
  double h = std::min(settings.max_step, 1e-3);
  const double t_edge = std::max(settings.min_step, 1e-14 * t_end);

  while (true) {
    if (t_end - state.t <= t_edge) {
      record.termination = Termination::TimeLimit;
      break;
    }
    if (problem.gradient(state.x1).norm() <= record.gtol_effective) {
      record.termination = Termination::Converged;
      break;
    }

    StepOutcome step;
    double margin_new;
    try {
      step = step_flow(state, structure, params, problem, settings,
                       std::min(h, t_end - state.t));
      if (!step.accepted) {
        record.termination = Termination::GuardStuck;
        break;
      }
      margin_new = margin(step.state);
    } catch (const DegenerateDenominator&) {
      record.termination = Termination::DegenerateDenominator;
      break;
    } catch (const ZeroGradient&) {
      record.termination = Termination::Converged;
      break;
    }

    if (margin_new < 0.0) {
      HybridState boundary;
      try {
        boundary = locate_crossing(state, step.state, advance, margin,
                                   settings.event_time_tol);
      } catch (const DegenerateDenominator&) {
        record.termination = Termination::DegenerateDenominator;
        break;
      }
      const Vector g_jump = problem.gradient(boundary.x1);
      if (g_jump.norm() <= record.gtol_effective) {
        state = boundary;
        record.termination = Termination::Converged;
        break;
      }
      HybridState after{boundary.x1, Vector(-params.beta * g_jump), boundary.t};

      JumpEvent event;
      event.t_jump = boundary.t;
      event.before = boundary;
      event.after = after;
      event.inter_jump_duration = boundary.t - segment_start_t;
      event.zeno_lower_bound = segment_bound(segment_entry_grad);
      record.jumps.push_back(event);

      if (margin(after) <= 0.0) {
        state = after;
        push_sample(state, true);
        record.termination = Termination::GuardStuck;
        break;
      }
      state = after;
      segment_start_t = state.t;
      segment_entry_grad = g_jump.norm();
      push_sample(state, true);
      h = step.h_next;
      continue;
    }

    state = step.state;
    h = step.h_next;
    if (state.t >= next_sample_t) {
      push_sample(state, false);
      next_sample_t = settings.sample_interval *
                      (std::floor(state.t / settings.sample_interval) + 1.0);
    }
  }

  if (record.samples.empty() || record.samples.back().t < state.t)
    push_sample(state, false);
  return record;
}

}  // namespace hybridgrad
