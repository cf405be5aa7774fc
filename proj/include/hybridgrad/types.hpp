#ifndef HYBRIDGRAD_TYPES_HPP
#define HYBRIDGRAD_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace hybridgrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Which of the two hybrid control structures drives the dynamics:
/// Damping treats the velocity coefficient as the control input,
/// Potential treats the gradient coefficient as the control input.
enum class ControlStructure { Damping, Potential };

/// Parameter block shared by both structures: desired exponential rate,
/// jump gain, and the admissible control interval that defines the flow set.
struct HybridParams {
  double alpha = 0.0;  // exponential decay rate of the suboptimality gap
  double beta = 0.0;   // jump gain: the reset velocity is -beta * grad f(x1)
  double u_lo = 0.0;   // lower end of the admissible control interval
  double u_hi = 0.0;   // upper end
};

/// Position/velocity pair with elapsed time.
struct HybridState {
  Vector x1;  // position
  Vector x2;  // velocity
  double t = 0.0;
};

/// Time derivative of a HybridState under a flow map.
struct FlowDerivative {
  Vector dx1;
  Vector dx2;
};

/// One violated feasibility inequality. `condition` is a stable identifier
/// ("u_lo", "u_hi", "rate", "c1_c2", "beta", "step"); `detail` carries the
/// numbers that broke it.
struct ConditionViolation {
  std::string condition;
  std::string detail;
};

/// The state-dependent feedback denominator collapsed below its safe floor.
struct DegenerateDenominator : std::runtime_error {
  DegenerateDenominator()
      : std::runtime_error("state-dependent feedback denominator below floor") {}
};

/// Gradient vanished: the trajectory reached a stationary (hence optimal) point.
struct ZeroGradient : std::runtime_error {
  ZeroGradient() : std::runtime_error("gradient is zero: optimum reached") {}
};

inline std::string join_violations(const std::vector<ConditionViolation>& v) {
  std::string out;
  for (const auto& item : v) {
    if (!out.empty()) out += "; ";
    out += item.condition + ": " + item.detail;
  }
  return out;
}

}  // namespace hybridgrad

#endif  // HYBRIDGRAD_TYPES_HPP
