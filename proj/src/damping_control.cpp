#include "hybridgrad/damping_control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hybridgrad::damping {

double feedback(const Vector& x1, const Vector& x2, double alpha,
                const Problem& problem) {
  const Vector g = problem.gradient(x1);
  const double denom = -g.dot(x2);
  const double floor = kDenominatorFloor * (1.0 + g.norm() * x2.norm());
  if (std::abs(denom) < floor) throw DegenerateDenominator();
  const double quad = problem.hessian_quad(x1, x2);
  return alpha + (g.squaredNorm() - quad) / denom;
}

FlowDerivative flow(const HybridState& state, double u, const Problem& problem) {
  FlowDerivative d;
  d.dx1 = state.x2;
  d.dx2 = -problem.gradient(state.x1) - u * state.x2;
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
  const double inv_beta = 1.0 / params.beta;
  const double lo_bound = params.alpha + inv_beta - constants.L_f * params.beta;
  const double hi_bound = params.alpha + inv_beta + constants.ell_f * params.beta;
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
  if (r <= 1.0)
    throw std::invalid_argument("damping zeno bound: r must exceed 1");
  const double inv_beta = 1.0 / params.beta;
  const double a1 =
      std::min(params.u_hi - (params.alpha + inv_beta + constants.ell_f * params.beta),
               (params.alpha + inv_beta - constants.L_f * params.beta) - params.u_lo);
  if (a1 <= 0.0)
    throw std::invalid_argument(
        "damping zeno bound: parameters are infeasible (a1 <= 0)");

  ZenoConstants z;
  const double gap = params.u_hi - params.alpha;
  z.velocity_ratio = (gap + std::sqrt(gap * gap + 4.0 * constants.L_f)) / 2.0;
  z.growth_rate = z.velocity_ratio + std::max(params.u_hi, -params.u_lo);
  z.hess_norm_max = std::max(constants.ell_f, constants.L_f);
  z.a1 = a1;
  z.a2 = r * constants.L_f / z.growth_rate * (r * params.beta * z.velocity_ratio + 1.0) +
         inv_beta + (r * r + r + 1.0) * params.beta * z.hess_norm_max;
  z.a3 = r * r * r * params.beta * params.beta * constants.H_f / z.growth_rate;
  z.r = r;
  return z;
}

ZenoBound zeno_bound(const HybridParams& params, const Constants& constants,
                     double grad_norm0, const std::vector<double>& r_grid) {
  if (r_grid.empty())
    throw std::invalid_argument("damping zeno bound: empty r grid");
  if (grad_norm0 < 0.0)
    throw std::invalid_argument("damping zeno bound: negative gradient norm");

  ZenoBound best{-1.0, 0.0, {}};
  for (double r : r_grid) {
    const ZenoConstants z = zeno_constants(params, constants, r);
    const double arg = std::min(z.a1 / (z.a2 + z.a3 * grad_norm0) + 1.0, r);
    const double tau = std::log(arg) / z.growth_rate;
    if (tau > best.tau_lb) best = ZenoBound{tau, r, z};
  }
  return best;
}

}  // namespace hybridgrad::damping
