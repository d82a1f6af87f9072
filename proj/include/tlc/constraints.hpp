#ifndef TLC_CONSTRAINTS_HPP
#define TLC_CONSTRAINTS_HPP

// Per-step affine control constraints for the four safety methods (HOCBF,
// TLC, event-driven TLC, rTLC), the relaxable stability row, control-rate
// bounds, and the grid estimator for the Lagrange-remainder lower bound.

#include "tlc/lie.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tlc {

/// One affine row  a . u + s * delta + b >= 0  in the decision variables
/// (control u, slack delta). Safety rows are hard (s = 0); the stability row
/// is relaxable (s = +1).
struct LinearControlConstraint {
  Eigen::RowVectorXd a;
  double s = 0.0;
  double b = 0.0;

  double lhs(const Control& u, double delta = 0.0) const {
    return a.dot(u) + s * delta + b;
  }

  /// Row multiplied through by k (same constraint for k > 0).
  LinearControlConstraint scaled(double k) const { return {a * k, s * k, b * k}; }
};

/// Lower bound on the Lagrange remainder, expressed in the case-study row
/// normalization (the order-m Taylor row divided by dt^m / m!).
struct RemainderBound {
  enum class Provenance { closed_form, grid };
  double r_min = 0.0;
  Provenance provenance = Provenance::closed_form;
  std::vector<int> grid_resolution;  // per state axis, when provenance == grid
};

/// Box region S(x) = { y : x - x_lower <= y <= x + x_up } around a state.
struct EventRegion {
  Eigen::VectorXd x_lower;  // downward half-widths, >= 0
  Eigen::VectorXd x_up;     // upward half-widths, >= 0

  void validate() const;
  bool contains(const State& center, const State& y) const;
};

/// Admissible control-rate interval keeping u inside its box over one dt.
struct ControlRateBounds {
  Eigen::VectorXd du_lower;
  Eigen::VectorXd du_upper;
};

/// Normalization factor m! / dt^m that maps the raw order-m Taylor row onto
/// the case-study row (unit coefficient on L_f^m h).
double row_normalization(int m, double delta_t);

/// Order-m Taylor row under zero-order hold, in raw form:
///   a = lgh_m1 * dt^m / m!,   b = sum_{k=0}^{m} h_vals[k] * dt^k / k!.
/// The row LHS at a given u is the order-m Taylor prediction of h one
/// interval ahead. Divide by dt^m/m! for the case-study normalization.
LinearControlConstraint tlc_row(const LieJet& jet, double delta_t);

/// Second-order HOCBF row  L_f^2 h + L_g L_f h u + (p1+p2) L_f h + p1 p2 h >= 0.
LinearControlConstraint hocbf_row(const LieJet& jet, double p1, double p2);

/// Lagrange remainder evaluated from the order-(m+1) jet fields (raw units):
///   R = [h_m1 + (lgh_m + lflg + lg2) . u + lgh_m1 . du] * dt^{m+1} / (m+1)!.
double remainder_terms(const LieJet& jet, const Control& u, const Control& du,
                       double delta_t);

/// Rate interval such that one forward-Euler step of length delta_t from u
/// cannot leave [u_min, u_max]:  -(u - u_min)/dt <= udot <= (u_max - u)/dt.
ControlRateBounds du_bounds(const Control& u, const ControlBounds& bounds,
                            double delta_t);

/// Minimize remainder_terms over a state grid times the (u, du) boxes with
/// du in [-(u_max-u_min)/dt, +(u_max-u_min)/dt]. The remainder is affine in
/// (u, du) for fixed x, so the control axes are evaluated at their corners
/// only; grid_res refines the state axes (one entry per axis, or a single
/// broadcast value). Result is reported in the row normalization.
RemainderBound estimate_rmin_grid(const DynamicsModel& model, const SafetyFunction& safety,
                                  const StateBox& x_box, const ControlBounds& bounds,
                                  double delta_t, const std::vector<int>& grid_res);

/// tlc_row with b increased by r_min. r_min must be expressed in the same
/// units as the row it is added to.
LinearControlConstraint rtlc_row(const LieJet& jet, double delta_t, double r_min);

/// Worst-case TLC row over a grid on S(x_center): minimum b across the grid
/// and, when control coefficients vary, the candidate row whose feasible set
/// best approximates the intersection of all grid rows (raw row units).
LinearControlConstraint etlc_row(const DynamicsModel& model, const SafetyFunction& safety,
                                 const State& x_center, const EventRegion& region,
                                 double delta_t, const std::vector<int>& grid_res);

/// Relaxable stability row for a relative-degree-one Lyapunov-like jet:
///   -L_f V - L_g V . u - V/dt + delta >= 0,
/// i.e. satisfaction means L_f V + L_g V . u + V/dt <= delta.
LinearControlConstraint tls_row(const LieJet& jet_v, double delta_t);

}  // namespace tlc

#endif  // TLC_CONSTRAINTS_HPP
