#ifndef HYBRIDGRAD_BASELINES_HPP
#define HYBRIDGRAD_BASELINES_HPP

#include <optional>
#include <string>

#include "hybridgrad/hybrid_integrator.hpp"
#include "hybridgrad/problem.hpp"
#include "hybridgrad/types.hpp"

namespace hybridgrad {

struct BaselineSample {
  double t;  // continuous time, or the iteration index for discrete methods
  double f_gap;
  bool restart_flag;
};

struct BaselineRun {
  std::vector<BaselineSample> samples;
  std::string method;  // "nwr" | "nsr" | "ngr" | "gd"
  Termination termination = Termination::TimeLimit;
};

/// Vanishing-damping second-order flow ddX + (3/t) dX + grad f(X) = 0,
/// integrated from (X(t_start) = x1_0, dX(t_start) = 0) without restarts.
/// t_start must be positive (the damping is singular at zero).
BaselineRun nwr_ode(const Problem& problem, const Vector& x1_0, double t_start,
                    double t_end, const IntegratorSettings& settings);

/// Same flow with the speed-restart rule: when d|dX|^2/dt first drops to the
/// threshold (default 0) after having been positive, the local damping clock
/// resets to t_start and the velocity to zero, keeping the position. With
/// threshold -inf no restart ever fires and the run matches nwr_ode exactly.
BaselineRun nsr_speed_restart(const Problem& problem, const Vector& x1_0,
                              double t_start, double t_end,
                              const IntegratorSettings& settings,
                              double restart_threshold = 0.0);

/// Two-sequence accelerated iteration with momentum weight (t_k - 1)/t_{k+1},
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2))/2, and a gradient-based restart: when
/// <grad f(y_{k-1}), x_k - x_{k-1}> > 0 the momentum sequence resets.
BaselineRun ngr_discrete(const Problem& problem, const Vector& x1_0, double s,
                         int k_max, double gtol = 0.0);

/// Plain gradient descent x_{k+1} = x_k - s grad f(x_k).
BaselineRun gd(const Problem& problem, const Vector& x1_0, double s, int k_max,
               double gtol = 0.0);

}  // namespace hybridgrad

#endif  // HYBRIDGRAD_BASELINES_HPP
