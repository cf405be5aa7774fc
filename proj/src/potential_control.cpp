#include "hybridgrad/potential_control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hybridgrad::potential {

double feedback(const Vector& x1, const Vector& x2, double alpha,
                const Problem& problem) {
  const Vector g = problem.gradient(x1);
  const double gn2 = g.squaredNorm();
  if (gn2 < 1e-300) throw ZeroGradient();
  const double quad = problem.hessian_quad(x1, x2);
  return (quad + (1.0 - alpha) * (-g.dot(x2))) / gn2;
}

FlowDerivative flow(const HybridState& state, double u, const Problem& problem) {
  FlowDerivative d;
  d.dx1 = state.x2;
  d.dx2 = -state.x2 - u * problem.gradient(state.x1);
  return d;
}

double flow_margin(const HybridState& state, const HybridParams& params,
                   const Problem& problem) {
  const double u = feedback(state.x1, state.x2, params.alpha, problem);
  return std::min(params.u_hi - u, u - params.u_lo);
}

HybridState jump(const Vector& x1, double beta, const Problem& problem) {
  const Vector g = problem.gradient(x1);
  if (g.norm() == 0.0) throw ZeroGradient();
  return HybridState{x1, Vector(-beta * g), 0.0};
}

std::vector<ConditionViolation> validate_params(const HybridParams& params,
                                                const Constants& constants) {
  std::vector<ConditionViolation> out;
  const double beta2 = params.beta * params.beta;
  const double lo_bound = -constants.ell_f * beta2 + (1.0 - params.alpha) * params.beta;
  const double hi_bound = constants.L_f * beta2 + (1.0 - params.alpha) * params.beta;
  const double rate_bound = 2.0 * constants.mu_f * params.beta;

  auto add = [&out](const char* id, double lhs, const char* rel, double rhs) {
    std::ostringstream msg;
    msg << lhs << " " << rel << " " << rhs << " fails";
    out.push_back(ConditionViolation{id, msg.str()});
  };
  if (!(params.u_lo < lo_bound)) add("u_lo", params.u_lo, "<", lo_bound);
  if (!(params.u_hi > hi_bound)) add("u_hi", params.u_hi, ">", hi_bound);
  if (!(params.alpha <= rate_bound)) add("rate", params.alpha, "<=", rate_bound);
  return out;
}

ZenoConstants zeno_constants(const HybridParams& params,
                             const Constants& constants, double r) {
  if (r <= 0.0 || r >= 1.0)
    throw std::invalid_argument("potential zeno bound: r must lie in (0,1)");
  const double beta = params.beta;
  const double beta2 = beta * beta;
  const double clearance =
      std::min(params.u_hi - (constants.L_f * beta2 + (1.0 - params.alpha) * beta),
               (-constants.ell_f * beta2 + (1.0 - params.alpha) * beta) - params.u_lo);
  if (clearance <= 0.0)
    throw std::invalid_argument(
        "potential zeno bound: parameters are infeasible (clearance <= 0)");

  ZenoConstants z;
  z.clearance = clearance;
  z.input_bound = std::max(params.u_hi, -params.u_lo);
  z.hess_norm_max = std::max(constants.ell_f, constants.L_f);
  z.omega = z.hess_norm_max * std::sqrt(beta2 + beta * z.input_bound);
  const double shrink = (1.0 - r) * (1.0 - r) * (1.0 - r);
  z.b1 = 2.0 * z.hess_norm_max * beta *
         (z.input_bound + z.omega * (beta + z.input_bound)) / shrink;
  z.b2 = std::abs(params.alpha - 1.0) * 2.0 * z.omega * beta / shrink +
         std::abs(params.alpha - 1.0) * params.alpha * beta * (1.0 + r);
  z.r = r;
  return z;
}

ZenoBound zeno_bound(const HybridParams& params, const Constants& constants,
                     const std::vector<double>& r_grid) {
  if (r_grid.empty())
    throw std::invalid_argument("potential zeno bound: empty r grid");

  ZenoBound best{-1.0, 0.0, {}};
  for (double r : r_grid) {
    const ZenoConstants z = zeno_constants(params, constants, r);
    const double tau = std::min(r / z.omega, z.clearance / (z.b1 + z.b2));
    if (tau > best.tau_lb) best = ZenoBound{tau, r, z};
  }
  return best;
}

}  // namespace hybridgrad::potential
