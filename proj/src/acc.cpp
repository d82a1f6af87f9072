#include "tlc/acc.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tlc::acc {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void AccParams::validate() const {
  if (mass <= 0.0 || gravity <= 0.0) throw std::invalid_argument("AccParams: mass/gravity must be > 0");
  if (f0 < 0.0 || f1 <= 0.0 || f2 <= 0.0) throw std::invalid_argument("AccParams: bad resistance coefficients");
  if (safe_distance <= 0.0) throw std::invalid_argument("AccParams: safe_distance must be > 0");
  if (c_a <= 0.0 || c_d <= 0.0) throw std::invalid_argument("AccParams: c_a/c_d must be > 0");
  if (delta_t <= 0.0 || dt <= 0.0) throw std::invalid_argument("AccParams: delta_t/dt must be > 0");
  if (dt > delta_t + 1e-12) throw std::invalid_argument("AccParams: requires dt <= delta_t");
  if (p1 <= 0.0 || p2 <= 0.0) throw std::invalid_argument("AccParams: p1/p2 must be > 0");
  if (p_sl <= 0.0) throw std::invalid_argument("AccParams: p_sl must be > 0");
  region.validate();
}

ControlBounds AccParams::control_bounds() const {
  ControlBounds b;
  b.u_min = Eigen::VectorXd::Constant(1, u_min());
  b.u_max = Eigen::VectorXd::Constant(1, u_max());
  return b;
}

double resistance(const AccParams& p, double v) {
  return p.f0 * sgn(v) + p.f1 * v + p.f2 * v * v;
}

double resistance_slope(const AccParams& p, double v) { return p.f1 + 2.0 * p.f2 * v; }

Eigen::Vector2d acc_dynamics(const AccParams& p, const AccState& x, double u) {
  return {(-resistance(p, x.v) + u) / p.mass, p.v0 - x.v};
}

DynamicsModel acc_model(const AccParams& p) {
  DynamicsModel model;
  model.n = 2;
  model.q = 1;
  model.f = [p](const State& x) {
    return Eigen::Vector2d(-resistance(p, x(0)) / p.mass, p.v0 - x(0));
  };
  model.g = [p](const State&) {
    Eigen::MatrixXd g(2, 1);
    g << 1.0 / p.mass, 0.0;
    return g;
  };
  return model;
}

LieJet acc_lie_jet(const AccParams& p, const AccState& x) {
  const double M = p.mass;
  const double fr = resistance(p, x.v);
  const double frp = resistance_slope(p, x.v);

  LieJet jet;
  jet.m = 2;
  jet.h_vals = {x.z - p.safe_distance, p.v0 - x.v, fr / M};
  jet.lgh_m1 = Eigen::RowVectorXd::Constant(1, -1.0 / M);
  jet.has_order3 = true;
  jet.h_m1 = -frp * fr / (M * M);
  jet.lgh_m = Eigen::RowVectorXd::Constant(1, frp / (M * M));
  jet.lflg = Eigen::RowVectorXd::Zero(1);
  jet.lg2 = Eigen::RowVectorXd::Zero(1);
  return jet;
}

SafetyFunction acc_safety(const AccParams& p) {
  SafetyFunction s;
  s.m = 2;
  s.h = [p](const State& x) { return x(1) - p.safe_distance; };
  s.oracle = [p](const State& x) { return acc_lie_jet(p, AccState::from_vec(x)); };
  return s;
}

LieJet acc_tls_jet(const AccParams& p, const AccState& x) {
  const double e = x.v - p.v_d;
  LieJet jet;
  jet.m = 1;
  jet.h_vals = {e * e, 2.0 * e * (-resistance(p, x.v) / p.mass)};
  jet.lgh_m1 = Eigen::RowVectorXd::Constant(1, 2.0 * e / p.mass);
  return jet;
}

double acc_remainder_case_study_u_coeff(const AccParams& p, double v) {
  return resistance_slope(p, v) / p.mass;
}

RemainderBound acc_rmin_closed_form(const AccParams& p, double v_t0, double delta_t) {
  if (delta_t <= 0.0) throw std::invalid_argument("acc_rmin_closed_form: delta_t <= 0");
  const double M = p.mass;
  const double umin = p.u_min();
  const double umax = p.u_max();
  const double term_rate = (delta_t / 3.0) * ((-(umax - umin) / delta_t + p.f1 * umin) / M);
  const double term_speed =
      (delta_t / 3.0) * (2.0 * p.f2 * (v_t0 + delta_t * umax / M) * umin / M);
  RemainderBound out;
  out.r_min = term_rate + term_speed;
  out.provenance = RemainderBound::Provenance::closed_form;
  return out;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::hocbf: return "hocbf";
    case Method::tlc: return "tlc";
    case Method::etlc: return "etlc";
    case Method::rtlc: return "rtlc";
  }
  return "unknown";
}

std::optional<Method> method_from_string(const std::string& s) {
  if (s == "hocbf") return Method::hocbf;
  if (s == "tlc") return Method::tlc;
  if (s == "etlc") return Method::etlc;
  if (s == "rtlc") return Method::rtlc;
  return std::nullopt;
}

StepResult acc_step_controller(const AccParams& p, const AccState& x, Method method,
                               const std::optional<AccState>& trigger_state) {
  const auto t_assembly = Clock::now();
  const double M = p.mass;
  const double norm = row_normalization(2, p.delta_t);  // 2 / delta_t^2

  StepDiagnostics diag;
  LinearControlConstraint safety_row;
  switch (method) {
    case Method::hocbf:
      safety_row = hocbf_row(acc_lie_jet(p, x), p.p1, p.p2);
      break;
    case Method::tlc:
      safety_row = tlc_row(acc_lie_jet(p, x), p.delta_t).scaled(norm);
      break;
    case Method::rtlc: {
      const RemainderBound rm = acc_rmin_closed_form(p, x.v, p.delta_t);
      diag.rmin_chain = rm.r_min;
      diag.rmin_row_scale = norm;
      safety_row = rtlc_row(acc_lie_jet(p, x), p.delta_t, rm.r_min).scaled(norm);
      break;
    }
    case Method::etlc: {
      const AccState center = trigger_state.value_or(x);
      safety_row = etlc_row(acc_model(p), acc_safety(p), center.vec(), p.region,
                            p.delta_t, {5, 5})
                       .scaled(norm);
      break;
    }
  }
  const LinearControlConstraint stability_row = tls_row(acc_tls_jet(p, x), p.delta_t);

  const double fr = resistance(p, x.v);
  QpProblem qp;
  qp.quad = Eigen::Matrix2d::Zero();
  qp.quad(0, 0) = 2.0 / (M * M);
  qp.quad(1, 1) = 2.0 * p.p_sl;
  qp.lin = Eigen::Vector2d(-2.0 * fr / (M * M), 0.0);
  qp.constant = fr * fr / (M * M);
  qp.box_lower = Eigen::Vector2d(p.u_min(), 0.0);
  qp.box_upper = Eigen::Vector2d(p.u_max(), std::numeric_limits<double>::infinity());
  qp.add_row(Eigen::RowVector2d(safety_row.a(0), safety_row.s), safety_row.b);
  qp.add_row(Eigen::RowVector2d(stability_row.a(0), stability_row.s), stability_row.b);
  diag.assembly_time_s = seconds_since(t_assembly);

  const auto t_solve = Clock::now();
  const QpSolution sol = solve_qp(qp);
  diag.solve_time_s = seconds_since(t_solve);
  diag.qp_status = sol.status;

  StepResult result;
  if (sol.status == QpStatus::infeasible) {
    // Hard safety row unsatisfiable inside the control box: clamp to the
    // bound that maximizes its LHS and absorb the stability row with slack.
    result.u = safety_row.a(0) <= 0.0 ? p.u_min() : p.u_max();
    result.delta = std::max(0.0, -stability_row.lhs(Eigen::VectorXd::Constant(1, result.u), 0.0));
    diag.infeasible_fallback = true;
  } else {
    result.u = sol.z(0);
    result.delta = sol.z(1);
  }
  diag.safety_row_lhs = safety_row.lhs(Eigen::VectorXd::Constant(1, result.u), result.delta);
  result.diag = diag;
  return result;
}

}  // namespace tlc::acc
