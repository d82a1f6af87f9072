#ifndef TLC_SIM_HPP
#define TLC_SIM_HPP

// Zero-order-hold closed-loop simulation with dense inter-sample safety
// auditing: fixed-step RK4 between control updates, with every substep state
// recorded so that min h is taken over the full dense grid, not just the
// control instants.

#include "tlc/acc.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace tlc::sim {

using acc::AccParams;
using acc::AccState;
using acc::Method;

struct SimConfig {
  Method method = Method::rtlc;
  AccParams params;
  AccState x0{24.0, 90.0};
  double horizon = 30.0;  // s; params.dt must divide it
  int substeps = 10;      // RK4 substeps per control interval
  std::uint64_t seed = 0; // determinism tag, recorded only

  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  double v = 0.0;
  double z = 0.0;
  double u = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double safety_row_lhs = 0.0;
  QpStatus qp_status = QpStatus::optimal;
  bool terminal = false;  // final state row, no control attached
  double solve_time_s = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;               // T/dt controls + terminal row
  std::vector<std::pair<double, double>> substep_h;    // (t_sub, h_sub), substeps per interval
};

struct SimSummary {
  double min_h = 0.0;  // over the initial state and every substep
  double mean_solve_time_s = 0.0;
  double std_solve_time_s = 0.0;  // sample standard deviation
  int infeasible_steps = 0;
  int triggers = 0;  // worst-case centers adopted (etlc only; includes t = 0)
};

struct SimResult {
  Trajectory trajectory;
  SimSummary summary;
};

/// Classical RK4 with step dt/substeps under constant u (zero-order hold).
/// Returns the terminal state and the state after every substep.
std::pair<AccState, std::vector<AccState>> integrate_step(const AccParams& p,
                                                          const AccState& x, double u,
                                                          double dt, int substeps);

/// True iff x has left S(trigger_state), i.e. some component lies outside
/// [trigger_state - x_lower, trigger_state + x_up].
bool event_trigger_check(const AccState& x, const AccState& trigger_state,
                         const EventRegion& region);

/// Closed loop: at each control instant run the per-step controller (for
/// etlc, re-trigger when the state leaves the region or delta_t has elapsed),
/// hold the control over the interval, and log every substep h.
SimResult run_simulation(const SimConfig& config);

}  // namespace tlc::sim

#endif  // TLC_SIM_HPP
