#include "tlc/lie.hpp"

#include <cmath>
#include <stdexcept>

namespace tlc {

namespace {

bool finite(double v) { return std::isfinite(v); }

bool finite(const Eigen::RowVectorXd& v) { return v.allFinite(); }

double characteristic_scale(const State& x) {
  double s = 1.0;
  for (int i = 0; i < x.size(); ++i) s = std::max(s, std::abs(x(i)));
  return s;
}

}  // namespace

void StateBox::validate() const {
  if (lower.size() != upper.size()) throw std::invalid_argument("StateBox: size mismatch");
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower(i) <= upper(i))) throw std::invalid_argument("StateBox: lower > upper");
  }
}

bool StateBox::contains(const State& x) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) < lower(i) || x(i) > upper(i)) return false;
  }
  return true;
}

void ControlBounds::validate() const {
  if (u_min.size() != u_max.size()) throw std::invalid_argument("ControlBounds: size mismatch");
  for (int i = 0; i < u_min.size(); ++i) {
    if (!(u_min(i) <= u_max(i))) throw std::invalid_argument("ControlBounds: u_min > u_max");
  }
}

LieJet eval_lie_jet(const DynamicsModel& model, const SafetyFunction& safety,
                    const State& x) {
  if (!x.allFinite()) throw std::runtime_error("eval_lie_jet: non-finite state");
  if (!safety.oracle) throw std::runtime_error("eval_lie_jet: missing oracle");

  LieJet jet = safety.oracle(x);
  if (jet.m != safety.m) throw std::runtime_error("eval_lie_jet: oracle relative degree mismatch");
  if (static_cast<int>(jet.h_vals.size()) != jet.m + 1)
    throw std::runtime_error("eval_lie_jet: h_vals not populated through order m");
  for (int k = 0; k <= jet.m; ++k) {
    if (!finite(jet.h_vals[k]))
      throw std::runtime_error("eval_lie_jet: non-finite L_f^" + std::to_string(k) + " h");
  }
  if (jet.lgh_m1.size() != model.q || !finite(jet.lgh_m1))
    throw std::runtime_error("eval_lie_jet: bad L_g L_f^{m-1} h");
  if (jet.has_order3) {
    if (!finite(jet.h_m1)) throw std::runtime_error("eval_lie_jet: non-finite L_f^{m+1} h");
    if (jet.lgh_m.size() != model.q || !finite(jet.lgh_m))
      throw std::runtime_error("eval_lie_jet: bad L_g L_f^m h");
    if (jet.lflg.size() != model.q || !finite(jet.lflg))
      throw std::runtime_error("eval_lie_jet: bad L_f L_g L_f^{m-1} h");
    if (jet.lg2.size() != model.q || !finite(jet.lg2))
      throw std::runtime_error("eval_lie_jet: bad L_g^2 L_f^{m-1} h");
  }
  return jet;
}

namespace {

// L_f^k h via nested central differences. Each recursion level freezes the
// flow direction f at its own expansion point and widens the step so that
// the rounding noise inherited from the inner levels stays below truncation.
double fd_lf(const DynamicsModel& model, const SafetyFunction& safety, const State& x,
             int k, const FdConfig& cfg) {
  if (k == 0) return safety.h(x);

  const State fx = model.f(x);
  double fmax = 1.0;
  for (int i = 0; i < fx.size(); ++i) fmax = std::max(fmax, std::abs(fx(i)));
  const double step = cfg.rel_step * std::pow(cfg.order_step_growth, k - 1) *
                      characteristic_scale(x) / fmax;
  if (step <= 0.0 || !std::isfinite(step)) throw std::runtime_error("fd_lie_derivative: step underflow");

  const double plus = fd_lf(model, safety, x + step * fx, k - 1, cfg);
  const double minus = fd_lf(model, safety, x - step * fx, k - 1, cfg);
  const double est = (plus - minus) / (2.0 * step);
  if (!std::isfinite(est)) throw std::runtime_error("fd_lie_derivative: non-finite intermediate");
  return est;
}

}  // namespace

double fd_lie_derivative(const DynamicsModel& model, const SafetyFunction& safety,
                         const State& x, int k, const FdConfig& cfg) {
  if (k < 0 || k > safety.m + 1) throw std::invalid_argument("fd_lie_derivative: order out of range");
  return fd_lf(model, safety, x, k, cfg);
}

double fd_directional_derivative(const std::function<double(const State&)>& phi,
                                 const State& x, const State& dir, const FdConfig& cfg) {
  double dmax = 1.0;
  for (int i = 0; i < dir.size(); ++i) dmax = std::max(dmax, std::abs(dir(i)));
  const double step = cfg.rel_step * characteristic_scale(x) / dmax;
  return (phi(x + step * dir) - phi(x - step * dir)) / (2.0 * step);
}

OracleReport validate_oracle(const DynamicsModel& model, const SafetyFunction& safety,
                             const std::vector<State>& samples, double tol,
                             const FdConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("validate_oracle: no samples");

  const LieJet probe = safety.oracle(samples.front());
  const int top_order = probe.has_order3 ? safety.m + 1 : safety.m;

  OracleReport report;
  report.tol = tol;
  report.max_abs_err.assign(top_order + 1, 0.0);
  report.worst_state.assign(top_order + 1, samples.front());

  for (const State& x : samples) {
    const LieJet jet = safety.oracle(x);
    for (int k = 0; k <= top_order; ++k) {
      const double oracle_val = (k <= safety.m) ? jet.h_vals[k] : jet.h_m1;
      const double fd_val = fd_lie_derivative(model, safety, x, k, cfg);
      const double err = std::abs(oracle_val - fd_val);
      if (err > report.max_abs_err[k]) {
        report.max_abs_err[k] = err;
        report.worst_state[k] = x;
      }
    }
  }

  report.pass = true;
  for (double e : report.max_abs_err) {
    if (!(e <= tol)) report.pass = false;
  }
  return report;
}

}  // namespace tlc
