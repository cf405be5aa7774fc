#ifndef HYBRIDGRAD_POTENTIAL_CONTROL_HPP
#define HYBRIDGRAD_POTENTIAL_CONTROL_HPP

#include "hybridgrad/problem.hpp"
#include "hybridgrad/types.hpp"

namespace hybridgrad::potential {

/// Default tuning grid for the inter-jump lower bound (each entry in (0,1)).
inline const std::vector<double> kDefaultRGrid{0.1, 0.2, 0.3, 0.4, 0.5,
                                               0.6, 0.7, 0.8, 0.9};

/// Constants of the analytic inter-jump lower bound for the potential
/// structure. Unlike the damping structure the resulting bound is uniform:
/// it does not depend on the gradient norm at the segment entry.
struct ZenoConstants {
  double clearance;      // distance of the post-jump control to the interval ends
  double input_bound;    // max(u_hi, -u_lo)
  double hess_norm_max;  // max(ell_f, L_f)
  double omega;          // gradient drift rate along a segment
  double b1;             // curvature-driven slope coefficient
  double b2;             // rate-asymmetry slope coefficient
  double r;              // tuning scalar in (0,1)
};

struct ZenoBound {
  double tau_lb;
  double best_r;
  ZenoConstants consts;
};

/// Feedback u(x) = (<H x2, x2> + (1 - alpha) <grad, -x2>) / |grad|^2.
/// Throws ZeroGradient when the gradient vanishes.
double feedback(const Vector& x1, const Vector& x2, double alpha,
                const Problem& problem);

/// Flow map: dx1 = x2, dx2 = -x2 - u grad f(x1).
FlowDerivative flow(const HybridState& state, double u, const Problem& problem);

/// min(u_hi - u, u - u_lo); nonnegative iff the state is in the flow set.
double flow_margin(const HybridState& state, const HybridParams& params,
                   const Problem& problem);

/// Jump map: keeps the position, resets the velocity to -beta * grad f(x1).
HybridState jump(const Vector& x1, double beta, const Problem& problem);

/// Feasibility conditions for the target rate:
///   u_lo  <  -ell_f beta^2 + (1 - alpha) beta  ("u_lo")
///   u_hi  >   L_f beta^2 + (1 - alpha) beta    ("u_hi")
///   alpha <=  2 mu_f beta                      ("rate")
std::vector<ConditionViolation> validate_params(const HybridParams& params,
                                                const Constants& constants);

/// Evaluates the bound constants for one tuning scalar r in (0,1). Rejects
/// infeasible parameters (the clearance would be nonpositive).
ZenoConstants zeno_constants(const HybridParams& params,
                             const Constants& constants, double r);

/// Uniform lower bound on the time between consecutive jumps, maximized over
/// r_grid: tau >= min(r / omega, clearance / (b1 + b2)).
ZenoBound zeno_bound(const HybridParams& params, const Constants& constants,
                     const std::vector<double>& r_grid = kDefaultRGrid);

}  // namespace hybridgrad::potential

#endif  // HYBRIDGRAD_POTENTIAL_CONTROL_HPP
