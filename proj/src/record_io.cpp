#include "hybridgrad/record_io.hpp"

#include <cstdio>
#include <ostream>

namespace hybridgrad {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(const TrajectoryRecord& record, std::ostream& out) {
  out << "t,f_gap,u,sigma,grad_norm,jump_flag\n";
  for (const auto& s : record.samples) {
    out << format_g17(s.t) << ',' << format_g17(s.f_gap) << ','
        << format_g17(s.u) << ',' << format_g17(s.sigma) << ','
        << format_g17(s.grad_norm) << ',' << (s.jump_flag ? 1 : 0) << '\n';
  }
}

void write_discrete_csv(const DiscreteRun& run, std::ostream& out) {
  out << "k,f_gap,mode,per_step_ratio\n";
  for (const auto& it : run.iterates) {
    out << it.k << ',' << format_g17(it.f_gap) << ','
        << (it.mode == DiscreteMode::Flow ? "flow" : "jump") << ','
        << format_g17(it.per_step_ratio) << '\n';
  }
}

void write_baseline_csv(const BaselineRun& run, std::ostream& out) {
  out << "t,f_gap,restart_flag\n";
  for (const auto& s : run.samples) {
    out << format_g17(s.t) << ',' << format_g17(s.f_gap) << ','
        << (s.restart_flag ? 1 : 0) << '\n';
  }
}

}  // namespace hybridgrad
