#include "tlc/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace tlc::sim {

void SimConfig::validate() const {
  params.validate();
  if (horizon <= 0.0) throw std::invalid_argument("SimConfig: horizon must be > 0");
  if (substeps < 1) throw std::invalid_argument("SimConfig: substeps must be >= 1");
  const double steps = horizon / params.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::invalid_argument("SimConfig: dt must divide horizon");
  if (!std::isfinite(x0.v) || !std::isfinite(x0.z))
    throw std::invalid_argument("SimConfig: non-finite initial state");
}

std::pair<AccState, std::vector<AccState>> integrate_step(const AccParams& p,
                                                          const AccState& x, double u,
                                                          double dt, int substeps) {
  if (substeps < 1) throw std::invalid_argument("integrate_step: substeps must be >= 1");
  const double h = dt / substeps;

  Eigen::Vector2d s = x.vec();
  std::vector<AccState> dense;
  dense.reserve(substeps);
  for (int i = 0; i < substeps; ++i) {
    const Eigen::Vector2d k1 = acc_dynamics(p, AccState::from_vec(s), u);
    const Eigen::Vector2d k2 = acc_dynamics(p, AccState::from_vec(s + 0.5 * h * k1), u);
    const Eigen::Vector2d k3 = acc_dynamics(p, AccState::from_vec(s + 0.5 * h * k2), u);
    const Eigen::Vector2d k4 = acc_dynamics(p, AccState::from_vec(s + h * k3), u);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!s.allFinite())
      throw std::runtime_error("integrate_step: non-finite state at substep " + std::to_string(i));
    dense.push_back(AccState::from_vec(s));
  }
  return {dense.back(), dense};
}

bool event_trigger_check(const AccState& x, const AccState& trigger_state,
                         const EventRegion& region) {
  return !region.contains(trigger_state.vec(), x.vec());
}

SimResult run_simulation(const SimConfig& config) {
  config.validate();
  const AccParams& p = config.params;
  const int steps = static_cast<int>(std::round(config.horizon / p.dt));

  SimResult out;
  out.trajectory.samples.reserve(steps + 1);
  out.trajectory.substep_h.reserve(static_cast<std::size_t>(steps) * config.substeps);

  AccState x = config.x0;
  AccState trigger_state = x;
  double trigger_time = 0.0;
  int triggers = config.method == Method::etlc ? 1 : 0;

  double min_h = x.z - p.safe_distance;
  double sum_t = 0.0, sum_t2 = 0.0;
  int infeasible = 0;

  for (int k = 0; k < steps; ++k) {
    const double t = k * p.dt;
    if (config.method == Method::etlc && k > 0) {
      if (event_trigger_check(x, trigger_state, p.region) ||
          t - trigger_time >= p.delta_t - 1e-12) {
        trigger_state = x;
        trigger_time = t;
        ++triggers;
      }
    }

    const auto step =
        acc::acc_step_controller(p, x, config.method,
                                 config.method == Method::etlc
                                     ? std::optional<AccState>(trigger_state)
                                     : std::nullopt);
    infeasible += step.diag.infeasible_fallback ? 1 : 0;
    sum_t += step.diag.solve_time_s;
    sum_t2 += step.diag.solve_time_s * step.diag.solve_time_s;

    out.trajectory.samples.push_back({t, x.v, x.z, step.u, step.delta,
                                      x.z - p.safe_distance, step.diag.safety_row_lhs,
                                      step.diag.qp_status, false, step.diag.solve_time_s});

    auto [x_next, dense] = integrate_step(p, x, step.u, p.dt, config.substeps);
    const double sub_dt = p.dt / config.substeps;
    for (int i = 0; i < config.substeps; ++i) {
      const double h_sub = dense[i].z - p.safe_distance;
      out.trajectory.substep_h.emplace_back(t + (i + 1) * sub_dt, h_sub);
      min_h = std::min(min_h, h_sub);
    }
    x = x_next;
  }

  out.trajectory.samples.push_back({config.horizon, x.v, x.z, 0.0, 0.0,
                                    x.z - p.safe_distance, 0.0, QpStatus::optimal, true,
                                    0.0});

  out.summary.min_h = min_h;
  out.summary.mean_solve_time_s = steps > 0 ? sum_t / steps : 0.0;
  out.summary.std_solve_time_s =
      steps > 1 ? std::sqrt(std::max(0.0, (sum_t2 - sum_t * sum_t / steps) / (steps - 1)))
                : 0.0;
  out.summary.infeasible_steps = infeasible;
  out.summary.triggers = triggers;
  return out;
}

}  // namespace tlc::sim
