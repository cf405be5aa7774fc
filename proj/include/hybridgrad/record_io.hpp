#ifndef HYBRIDGRAD_RECORD_IO_HPP
#define HYBRIDGRAD_RECORD_IO_HPP

#include <iosfwd>
#include <string>

#include "hybridgrad/baselines.hpp"
#include "hybridgrad/discrete_solver.hpp"
#include "hybridgrad/hybrid_integrator.hpp"

namespace hybridgrad {

/// Shortest-round-trip decimal with 17 significant digits ("%.17g").
std::string format_g17(double v);

// CSV writers. Columns are fixed; one header row; 17-significant-digit
// decimals; flags as 0/1.

/// t,f_gap,u,sigma,grad_norm,jump_flag
void write_trajectory_csv(const TrajectoryRecord& record, std::ostream& out);

/// k,f_gap,mode,per_step_ratio
void write_discrete_csv(const DiscreteRun& run, std::ostream& out);

/// t,f_gap,restart_flag
void write_baseline_csv(const BaselineRun& run, std::ostream& out);

}  // namespace hybridgrad

#endif  // HYBRIDGRAD_RECORD_IO_HPP
