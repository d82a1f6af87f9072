#ifndef TLC_LIE_HPP
#define TLC_LIE_HPP

// Lie-derivative evaluation for control-affine systems xdot = f(x) + g(x) u.
// Closed-form per-model oracles supply the derivative bundle (LieJet); a
// finite-difference path exists only to cross-validate the oracles.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace tlc {

using State = Eigen::VectorXd;
using Control = Eigen::VectorXd;

/// Control-affine system: f maps state to drift, g to the n x q input matrix.
/// Both must be deterministic (bit-identical results for identical states).
struct DynamicsModel {
  int n = 0;  // state dimension
  int q = 0;  // control dimension
  std::function<State(const State&)> f;
  std::function<Eigen::MatrixXd(const State&)> g;
};

/// Component-wise box of admissible states.
struct StateBox {
  State lower;
  State upper;

  void validate() const;
  bool contains(const State& x) const;
};

/// Component-wise control box u_min <= u <= u_max.
struct ControlBounds {
  Control u_min;
  Control u_max;

  void validate() const;
};

/// Lie-derivative bundle at a state, orders 0..m plus the order-(m+1) terms
/// needed by remainder evaluation.
///
///   h_vals[k] = L_f^k h,  k = 0..m
///   lgh_m1    = L_g L_f^{m-1} h      (row, length q)
/// and, when has_order3 is set:
///   h_m1      = L_f^{m+1} h
///   lgh_m     = L_g L_f^m h
///   lflg      = L_f L_g L_f^{m-1} h
///   lg2       = L_g^2 L_f^{m-1} h
struct LieJet {
  int m = 0;
  std::vector<double> h_vals;
  Eigen::RowVectorXd lgh_m1;
  bool has_order3 = false;
  double h_m1 = 0.0;
  Eigen::RowVectorXd lgh_m;
  Eigen::RowVectorXd lflg;
  Eigen::RowVectorXd lg2;
};

/// Safety function h with relative degree m and its closed-form jet oracle.
struct SafetyFunction {
  int m = 1;
  std::function<double(const State&)> h;
  std::function<LieJet(const State&)> oracle;
};

/// Step selection for the finite-difference cross-validator. The base step is
/// rel_step times the characteristic state scale max(1, |x|_inf); each extra
/// differentiation order widens it by order_step_growth to keep rounding noise
/// below truncation error.
struct FdConfig {
  double rel_step = 1e-5;
  double order_step_growth = 10.0;
};

/// Evaluate the oracle jet at x and check every field is populated and finite.
/// Throws std::runtime_error naming the offending term otherwise.
LieJet eval_lie_jet(const DynamicsModel& model, const SafetyFunction& safety,
                    const State& x);

/// Central-difference estimate of L_f^k h(x), built by recursively
/// differencing the order-(k-1) estimate along the flow direction f.
double fd_lie_derivative(const DynamicsModel& model, const SafetyFunction& safety,
                         const State& x, int k, const FdConfig& cfg = {});

/// Central-difference directional derivative of a scalar field along dir.
double fd_directional_derivative(const std::function<double(const State&)>& phi,
                                 const State& x, const State& dir,
                                 const FdConfig& cfg = {});

/// Oracle-vs-finite-difference discrepancy report, per derivative order.
struct OracleReport {
  std::vector<double> max_abs_err;  // index k: max |oracle - fd| for L_f^k h
  std::vector<State> worst_state;   // state attaining the max, per order
  double tol = 0.0;
  bool pass = false;
};

/// Cross-validate the closed-form oracle against finite differences on the
/// given sample states, orders 0..m (plus m+1 when the jet carries it).
/// Failures are reported, never thrown.
OracleReport validate_oracle(const DynamicsModel& model, const SafetyFunction& safety,
                             const std::vector<State>& samples, double tol,
                             const FdConfig& cfg = {});

}  // namespace tlc

#endif  // TLC_LIE_HPP
