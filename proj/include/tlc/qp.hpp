#ifndef TLC_QP_HPP
#define TLC_QP_HPP

// Small dense convex QP solver for the per-step controller problems:
//   minimize 1/2 z' Q z + lin' z + constant
//   subject to row_a z + row_b >= 0 and box_lower <= z <= box_upper.

#include <Eigen/Dense>

#include <vector>

namespace tlc {

inline constexpr double kQpFeasTol = 1e-8;

enum class QpStatus { optimal, infeasible, max_iter };

const char* to_string(QpStatus s);

struct QpProblem {
  Eigen::MatrixXd quad;       // symmetric positive definite
  Eigen::VectorXd lin;
  double constant = 0.0;      // added to the reported objective
  Eigen::MatrixXd row_a;      // one inequality per row: row_a * z + row_b >= 0
  Eigen::VectorXd row_b;
  Eigen::VectorXd box_lower;  // -inf allowed
  Eigen::VectorXd box_upper;  // +inf allowed

  int dim() const { return static_cast<int>(quad.rows()); }
  int num_rows() const { return static_cast<int>(row_a.rows()); }
  void add_row(const Eigen::RowVectorXd& a, double b);
  double objective(const Eigen::VectorXd& z) const;
  void validate() const;
};

struct QpSolution {
  Eigen::VectorXd z;
  QpStatus status = QpStatus::infeasible;
  double objective = 0.0;
  std::vector<int> active_set;  // inequality rows tight at the solution
  Eigen::VectorXd row_duals;    // multiplier per inequality row (>= 0)
  Eigen::VectorXd box_lower_duals;
  Eigen::VectorXd box_upper_duals;
  int iterations = 0;
};

/// Dual active-set solve (dim <= 16). Returns the global minimizer of the
/// strictly convex QP, or status infeasible when no point satisfies all rows
/// and boxes. Deterministic: pivot ties break on the lowest constraint index.
QpSolution solve_qp(const QpProblem& prob);

/// Exhaustive grid minimization over the box (dim <= 3, finite boxes),
/// discarding infeasible grid points. Test oracle; independent of solve_qp.
QpSolution brute_force_qp(const QpProblem& prob, int grid_res);

/// Stationarity residual | Q z + lin - row_a' mu - box multipliers | at the
/// returned multipliers. Near zero at a true KKT point.
double kkt_residual(const QpProblem& prob, const QpSolution& sol);

}  // namespace tlc

#endif  // TLC_QP_HPP
