#ifndef HYBRIDGRAD_DAMPING_CONTROL_HPP
#define HYBRIDGRAD_DAMPING_CONTROL_HPP

#include "hybridgrad/problem.hpp"
#include "hybridgrad/types.hpp"

namespace hybridgrad::damping {

// Relative floor under which the <grad f, -x2> denominator of the feedback is
// treated as degenerate. Along admissible trajectories the denominator stays
// positive in exact arithmetic; runs terminate on the gradient tolerance well
// before this floor is reached.
inline constexpr double kDenominatorFloor = 1e-14;

/// Default tuning grid for the inter-jump lower bound (each entry > 1).
inline const std::vector<double> kDefaultRGrid{1.1, 2.0, 4.0, 8.0};

/// Constants of the analytic inter-jump lower bound for the damping structure.
struct ZenoConstants {
  double velocity_ratio;  // bound on |grad f| / |x2| along flow segments
  double growth_rate;     // exponential growth rate of segment deviations
  double hess_norm_max;   // max(ell_f, L_f)
  double a1;              // clearance of the post-jump control to the interval ends
  double a2;              // state-independent drift coefficient
  double a3;              // gradient-proportional drift coefficient
  double r;               // tuning scalar > 1
};

struct ZenoBound {
  double tau_lb;   // certified minimum time between consecutive jumps
  double best_r;   // grid entry attaining the maximum
  ZenoConstants consts;
};

/// Feedback u(x) = alpha + (|grad|^2 - <H x2, x2>) / <grad, -x2>.
/// Throws DegenerateDenominator when |<grad, -x2>| falls below
/// kDenominatorFloor * (1 + |grad| |x2|).
double feedback(const Vector& x1, const Vector& x2, double alpha,
                const Problem& problem);

/// Flow map: dx1 = x2, dx2 = -grad f(x1) - u x2.
FlowDerivative flow(const HybridState& state, double u, const Problem& problem);

/// Signed distance of the feedback value to the admissible interval:
/// min(u_hi - u, u - u_lo). Nonnegative iff the state is in the flow set.
double flow_margin(const HybridState& state, const HybridParams& params,
                   const Problem& problem);

/// Jump map: keeps the position, resets the velocity to -beta * grad f(x1).
/// Throws ZeroGradient at a stationary point (the run is over). The returned
/// state carries t = 0; the caller stamps the jump time.
HybridState jump(const Vector& x1, double beta, const Problem& problem);

/// Feasibility conditions for the target rate:
///   u_lo  <  alpha + 1/beta - L_f beta        ("u_lo")
///   u_hi  >  alpha + 1/beta + ell_f beta      ("u_hi")
///   alpha <= 2 mu_f beta                      ("rate")
/// Returns one entry per violated inequality; empty means feasible.
std::vector<ConditionViolation> validate_params(const HybridParams& params,
                                                const Constants& constants);

/// Evaluates the bound constants for one tuning scalar r > 1. Rejects
/// infeasible parameters (the clearance a1 would be nonpositive).
ZenoConstants zeno_constants(const HybridParams& params,
                             const Constants& constants, double r);

/// Lower bound on the time between consecutive jumps, maximized over r_grid:
///   tau >= (1/delta) log(min(a1 / (a2 + a3 g0) + 1, r))
/// where g0 is the gradient norm at the segment's entry state. The bound is
/// strictly positive and nonincreasing in g0.
ZenoBound zeno_bound(const HybridParams& params, const Constants& constants,
                     double grad_norm0,
                     const std::vector<double>& r_grid = kDefaultRGrid);

}  // namespace hybridgrad::damping

#endif  // HYBRIDGRAD_DAMPING_CONTROL_HPP
