#include "hybridgrad/discrete_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hybridgrad {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double lambda_rate(double s, double c1, double c2, double mu_f, double L_f) {
  return 1.0 + 2.0 * mu_f * (-s / c2 + L_f / (2.0 * c1) * s * s);
}

std::vector<ConditionViolation> validate_discrete(const DiscreteParams& params,
                                                  const Constants& constants) {
  std::vector<ConditionViolation> out;
  auto add = [&out](const char* id, const std::string& detail) {
    out.push_back(ConditionViolation{id, detail});
  };
  if (!(std::sqrt(params.c1) <= params.c2)) {
    std::ostringstream msg;
    msg << "sqrt(" << params.c1 << ") <= " << params.c2 << " fails";
    add("c1_c2", msg.str());
  }
  const double b2c1 = params.beta * params.beta * params.c1;
  const double bc2 = params.beta * params.c2;
  if (!(b2c1 <= 1.0 && 1.0 <= bc2)) {
    std::ostringstream msg;
    msg << b2c1 << " <= 1 <= " << bc2 << " fails";
    add("beta", msg.str());
  }
  const double lhs = params.c2 * constants.L_f * params.s;
  if (!(lhs < 2.0 * params.c1)) {
    std::ostringstream msg;
    msg << lhs << " < " << 2.0 * params.c1 << " fails";
    add("step", msg.str());
  }
  return out;
}

DiscreteParams corollary1_params(double L_f, double s) {
  if (s <= 0.0)
    throw std::invalid_argument("corollary1_params: s must be positive");
  DiscreteParams p;
  p.s = s;
  p.c2 = L_f * s;
  p.c1 = p.c2 * p.c2;
  p.beta = 1.0 / p.c2;
  return p;
}

bool in_discrete_flow_set(const Vector& x1, const Vector& x2, double c1,
                          double c2, const Problem& problem) {
  const Vector g = problem.gradient(x1);
  const double gn2 = g.squaredNorm();
  return c1 * x2.squaredNorm() <= gn2 && gn2 <= c2 * (-g.dot(x2));
}

DiscreteRun run_algorithm1(const Problem& problem, ControlStructure structure,
                           const DiscreteParams& params, double alpha,
                           const Vector& x1_0, int k_max, double gtol) {
  const auto violations = validate_discrete(params, problem.constants);
  if (!violations.empty())
    throw std::invalid_argument("run_algorithm1: infeasible parameters: " +
                                join_violations(violations));
  if (k_max < 0)
    throw std::invalid_argument("run_algorithm1: k_max must be nonnegative");

  DiscreteRun run;
  run.params = params;

  const auto gap_of = [&](const Vector& x1) {
    return problem.constants.f_star ? problem.value(x1) - *problem.constants.f_star
                                    : kNaN;
  };

  Vector x1 = x1_0;
  Vector g = problem.gradient(x1);
  Vector x2 = -params.beta * g;
  run.iterates.push_back(
      DiscreteStep{0, x1, x2, gap_of(x1), DiscreteMode::Flow, 1.0});

  bool last_was_jump = false;
  for (int k = 1; k <= k_max; ++k) {
    if (g.norm() <= gtol) {
      run.termination = Termination::Converged;
      return run;
    }

    DiscreteMode mode;
    if (in_discrete_flow_set(x1, x2, params.c1, params.c2, problem)) {
      bool degenerate = false;
      Vector x1_next, x2_next;
      try {
        if (structure == ControlStructure::Damping) {
          const double u = damping::feedback(x1, x2, alpha, problem);
          x1_next = x1 + params.s * x2;
          x2_next = x2 + params.s * (-g - u * x2);
        } else {
          const double u = potential::feedback(x1, x2, alpha, problem);
          x1_next = x1 + params.s * x2;
          x2_next = x2 + params.s * (-x2 - u * g);
        }
      } catch (const std::runtime_error&) {
        degenerate = true;  // feedback not evaluable here: fall back to a jump
      }
      if (!degenerate) {
        mode = DiscreteMode::Flow;
        const double prev_gap = run.iterates.back().f_gap;
        x1 = x1_next;
        x2 = x2_next;
        g = problem.gradient(x1);
        const double gap = gap_of(x1);
        const double ratio = std::isnan(prev_gap) ? kNaN
                             : prev_gap > 0.0    ? gap / prev_gap
                                                 : 1.0;
        run.iterates.push_back(DiscreteStep{k, x1, x2, gap, mode, ratio});
        last_was_jump = false;
        continue;
      }
    } else if (last_was_jump) {
      // A jump landed outside the flow set; stop rather than jump forever.
      run.termination = Termination::GuardStuck;
      return run;
    }

    mode = DiscreteMode::Jump;
    x2 = -params.beta * g;
    run.iterates.push_back(DiscreteStep{k, x1, x2, gap_of(x1), mode, 1.0});
    last_was_jump = true;
  }

  run.termination =
      g.norm() <= gtol ? Termination::Converged : Termination::TimeLimit;
  return run;
}

}  // namespace hybridgrad
