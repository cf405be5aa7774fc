#ifndef HYBRIDGRAD_HYBRID_INTEGRATOR_HPP
#define HYBRIDGRAD_HYBRID_INTEGRATOR_HPP

#include <functional>
#include <optional>

#include "hybridgrad/damping_control.hpp"
#include "hybridgrad/potential_control.hpp"
#include "hybridgrad/problem.hpp"
#include "hybridgrad/types.hpp"

namespace hybridgrad {

struct IntegratorSettings {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  double max_step = 0.05;
  double min_step = 1e-13;
  double event_time_tol = 1e-10;  // bisection window on a guard-crossing time
  // Gradient termination threshold; scaled by (1 + |grad f(x1_0)|) at run
  // start. The suboptimality gap at termination is then about gtol^2 / (2 mu_f).
  double gtol = 1e-10;
  double sample_interval = 0.01;  // output cadence
};

enum class Termination { TimeLimit, Converged, DegenerateDenominator, GuardStuck };

const char* to_string(Termination t);

struct TrajectorySample {
  double t;
  double f_gap;     // f(x1) - f_star; NaN when f_star is unknown
  double u;         // control value at the sample; NaN if not evaluable
  double sigma;     // level-set diagnostic; NaN when f_star is unknown
  double grad_norm;
  double x2_norm;
  bool jump_flag;   // true on the sample recorded immediately after a jump
};

struct JumpEvent {
  double t_jump;
  HybridState before;
  HybridState after;
  double inter_jump_duration;  // flow time of the segment this jump ends
  double zeno_lower_bound;     // analytic bound for that segment, from its entry state
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  std::vector<JumpEvent> jumps;
  Termination termination = Termination::TimeLimit;
  double gtol_effective = 0.0;
};

/// Level-set diagnostic sigma = <grad f(x1), x2> + alpha (f(x1) - f_star).
/// Both flow maps keep it constant; jumps reset it to a nonpositive value
/// under feasible parameters. Absent when f_star is unknown.
std::optional<double> sigma(const HybridState& state, double alpha,
                            const Problem& problem);

/// Right-hand side on the stacked state y = [x1; x2].
using OdeRhs =
    std::function<void(double t, const Vector& y, Vector& dy)>;

/// Flow field of the given structure with the feedback re-evaluated at every
/// stage. For the potential structure the control term vanishes together with
/// the gradient, so a zero-gradient state flows as pure velocity decay.
OdeRhs make_flow_rhs(ControlStructure structure, const HybridParams& params,
                     const Problem& problem);

struct RkStepResult {
  Vector y;
  double t;
  bool accepted;          // false only when the step size underflowed min_step
  double error_estimate;  // scaled local error of the accepted step
  double h_used;
  double h_next;
};

/// One fixed Dormand-Prince 5(4) step of size h; no error control.
void rk45_fixed_step(const OdeRhs& rhs, double t, const Vector& y, double h,
                     Vector& y_out);

/// One accepted adaptive step: attempts h, shrinks on rejection, grows the
/// proposal for the next call. Local error is controlled against
/// abs_tol + rel_tol * |y| componentwise.
RkStepResult rk45_step(const OdeRhs& rhs, double t, const Vector& y, double h,
                       double rel_tol, double abs_tol, double min_step,
                       double max_step);

struct StepOutcome {
  HybridState state;
  bool accepted;
  double error_estimate;
  double h_used;
  double h_next;
};

/// One accepted adaptive step of the structure's flow from `state`.
StepOutcome step_flow(const HybridState& state, ControlStructure structure,
                      const HybridParams& params, const Problem& problem,
                      const IntegratorSettings& settings, double h_init);

/// Bisection on time for the guard-crossing state between a state inside the
/// flow set (margin >= 0) and one outside (margin < 0). `advance` propagates
/// the inside state forward by dt along the flow. Returns a state on the
/// inside of the boundary whose crossing time is bracketed within
/// event_time_tol; if the inside state already sits on the boundary it is
/// returned unchanged. Rejects non-bracketing inputs.
HybridState locate_crossing(
    const HybridState& inside, const HybridState& outside,
    const std::function<HybridState(const HybridState&, double)>& advance,
    const std::function<double(const HybridState&)>& margin,
    double event_time_tol);

/// Runs the hybrid system: enters via the jump map (x2(0) = -beta grad f(x1_0)),
/// alternates flow segments and jumps at guard crossings, and records samples,
/// jump events and per-jump analytic bounds. Rejects infeasible parameters.
/// Identical inputs produce identical records.
TrajectoryRecord simulate(const Problem& problem, ControlStructure structure,
                          const HybridParams& params, const Vector& x1_0,
                          double t_end, const IntegratorSettings& settings);

}  // namespace hybridgrad

#endif  // HYBRIDGRAD_HYBRID_INTEGRATOR_HPP
