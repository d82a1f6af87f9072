#ifndef TLC_ACC_HPP
#define TLC_ACC_HPP

// Adaptive cruise control case study: longitudinal vehicle dynamics with
// resistance force, closed-form Lie jets for the distance constraint, the
// closed-form remainder lower bound, and the per-step QP controller.

#include "tlc/constraints.hpp"
#include "tlc/lie.hpp"
#include "tlc/qp.hpp"

#include <optional>
#include <string>

namespace tlc::acc {

/// Scenario parameters. Defaults reproduce the benchmark configuration.
struct AccParams {
  double v0 = 13.89;      // preceding-vehicle speed, m/s
  double v_d = 24.0;      // desired speed, m/s
  double mass = 1650.0;   // kg
  double gravity = 9.81;  // m/s^2
  double f0 = 0.1;        // N
  double f1 = 5.0;        // N s/m
  double f2 = 0.25;       // N s^2/m
  double safe_distance = 10.0;  // m, constraint z >= c
  double c_a = 0.4;       // max acceleration fraction of g
  double c_d = 0.7;       // max deceleration fraction of g
  double delta_t = 0.1;   // constraint horizon, s
  double dt = 0.1;        // control application interval, s (dt <= delta_t)
  double p1 = 1.0;        // HOCBF penalties
  double p2 = 1.0;
  double p_sl = 1.0;      // slack weight on the stability row
  EventRegion region{Eigen::Vector2d(0.5, 1.0), Eigen::Vector2d(0.5, 1.0)};

  double u_min() const { return -c_d * mass * gravity; }
  double u_max() const { return c_a * mass * gravity; }
  ControlBounds control_bounds() const;
  void validate() const;
};

/// Ego speed v and gap z to the preceding vehicle; state vector is (v, z).
struct AccState {
  double v = 0.0;
  double z = 0.0;

  Eigen::Vector2d vec() const { return {v, z}; }
  static AccState from_vec(const Eigen::Vector2d& x) { return {x(0), x(1)}; }
};

/// Resistance force f0 sgn(v) + f1 v + f2 v^2, with sgn(0) = 0.
double resistance(const AccParams& p, double v);

/// dF_r/dv away from the v = 0 kink: f1 + 2 f2 v.
double resistance_slope(const AccParams& p, double v);

/// (vdot, zdot) = ((-F_r(v) + u) / M, v0 - v).
Eigen::Vector2d acc_dynamics(const AccParams& p, const AccState& x, double u);

DynamicsModel acc_model(const AccParams& p);

/// Closed-form jet for h = z - c (relative degree 2):
///   h_vals = [z - c, v0 - v, F_r(v)/M],  lgh_m1 = [-1/M],
/// with exact order-3 terms
///   h_m1 = -F_r'(v) F_r(v) / M^2,  lgh_m = [F_r'(v) / M^2],  lflg = lg2 = [0].
///
/// In row units (x 2/dt^2) the order-3 remainder reduces to
///   (dt/3) * (F_r'(v) (u - F_r(v)) / M - udot) / M,
/// a tighter expression than the conservative bound chain used by
/// acc_rmin_closed_form, which inflates the u coefficient to F_r'(v)/M and
/// drops the drift term (see acc_remainder_case_study_u_coeff).
LieJet acc_lie_jet(const AccParams& p, const AccState& x);

SafetyFunction acc_safety(const AccParams& p);

/// Relative-degree-one jet of V = (v - v_d)^2 for the stability row.
LieJet acc_tls_jet(const AccParams& p, const AccState& x);

/// The u coefficient (f1 + 2 f2 v)/M appearing in the conservative
/// closed-form remainder chain. Diagnostic accessor; the exact Lie term
/// carries an extra 1/M (see acc_lie_jet).
double acc_remainder_case_study_u_coeff(const AccParams& p, double v);

/// Conservative closed-form lower bound on the remainder, in row units:
///   R_min = (dt/3) [(-(1/dt)(u_max - u_min) + f1 u_min) / M]
///         + (dt/3) [2 f2 (v_t0 + dt u_max / M) u_min / M].
RemainderBound acc_rmin_closed_form(const AccParams& p, double v_t0, double delta_t);

enum class Method { hocbf, tlc, etlc, rtlc };

const char* to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);

struct StepDiagnostics {
  QpStatus qp_status = QpStatus::optimal;
  bool infeasible_fallback = false;
  double safety_row_lhs = 0.0;  // normalized safety row at the applied (u, delta)
  double rmin_chain = 0.0;      // closed-form chain value (rtlc only)
  double rmin_row_scale = 1.0;  // factor applied to rmin_chain inside the stored row
  double solve_time_s = 0.0;    // QP solve only
  double assembly_time_s = 0.0; // jet + row construction
};

struct StepResult {
  double u = 0.0;
  double delta = 0.0;
  StepDiagnostics diag;
};

/// Assemble and solve the per-step QP with decision (u, delta):
///   minimize ((u - F_r(v))/M)^2 + p_sl delta^2
/// subject to one hard safety row for the chosen method, the relaxable
/// stability row for V = (v - v_d)^2, u in [u_min, u_max], delta >= 0.
///
/// Safety rows are stored in the case-study normalization (x m!/dt^m). For
/// rtlc the chain bound is added to the raw Taylor row before normalizing,
/// so its effective contribution in row units is rmin_chain * 2/dt^2; both
/// the chain value and that scale factor are reported in the diagnostics.
/// For etlc the row is the worst case over region around trigger_state
/// (defaults to x when absent).
///
/// If the QP is infeasible, u is clamped to the control bound that maximizes
/// the safety-row LHS and the step is flagged.
StepResult acc_step_controller(const AccParams& p, const AccState& x, Method method,
                               const std::optional<AccState>& trigger_state = {});

}  // namespace tlc::acc

#endif  // TLC_ACC_HPP
