#ifndef HYBRIDGRAD_DISCRETE_SOLVER_HPP
#define HYBRIDGRAD_DISCRETE_SOLVER_HPP

#include "hybridgrad/hybrid_integrator.hpp"
#include "hybridgrad/problem.hpp"
#include "hybridgrad/types.hpp"

namespace hybridgrad {

/// Parameters of the forward-Euler hybrid iteration: step size, the two
/// flow-set scalars, and the jump gain.
struct DiscreteParams {
  double s = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double beta = 0.0;
};

enum class DiscreteMode { Flow, Jump };

struct DiscreteStep {
  int k;
  Vector x1;
  Vector x2;
  double f_gap;           // NaN when f_star is unknown
  DiscreteMode mode;      // transition that produced this iterate (Flow at k=0)
  double per_step_ratio;  // f_gap ratio over the step; 1 on jumps and at k=0
};

struct DiscreteRun {
  std::vector<DiscreteStep> iterates;
  DiscreteParams params;
  Termination termination = Termination::TimeLimit;
};

/// Guaranteed per-flow-step contraction factor
/// lambda = 1 + 2 mu_f (-s/c2 + L_f s^2 / (2 c1)); lies in (0,1) whenever the
/// parameters are feasible.
double lambda_rate(double s, double c1, double c2, double mu_f, double L_f);

/// Feasibility conditions:
///   sqrt(c1) <= c2                ("c1_c2")
///   beta^2 c1 <= 1 <= beta c2     ("beta")
///   c2 L_f s < 2 c1               ("step")
std::vector<ConditionViolation> validate_discrete(const DiscreteParams& params,
                                                  const Constants& constants);

/// Optimal-rate parameter choice sqrt(c1) = c2 = 1/beta = L_f s, under which
/// the contraction factor is 1 - mu_f / L_f regardless of s. The conventional
/// step size is s = 1 / L_f.
DiscreteParams corollary1_params(double L_f, double s);

/// Discrete flow set: c1 |x2|^2 <= |grad f(x1)|^2 <= c2 <grad f(x1), -x2>,
/// with ties counting as inside.
bool in_discrete_flow_set(const Vector& x1, const Vector& x2, double c1,
                          double c2, const Problem& problem);

/// Forward-Euler hybrid iteration: starts from x2 = -beta grad f(x1_0); while
/// the iterate is in the discrete flow set it takes an Euler step of the
/// chosen structure's flow (with the feedback evaluated at the iterate),
/// otherwise it jumps. Stops at k_max iterations or |grad f| <= gtol.
/// A degenerate feedback denominator at a flow-set state forces a jump; a
/// jump that lands outside the flow set terminates the run (GuardStuck).
DiscreteRun run_algorithm1(const Problem& problem, ControlStructure structure,
                           const DiscreteParams& params, double alpha,
                           const Vector& x1_0, int k_max, double gtol);

}  // namespace hybridgrad

#endif  // HYBRIDGRAD_DISCRETE_SOLVER_HPP
