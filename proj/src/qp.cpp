#include "tlc/qp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tlc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All constraints in one list c_i' z + d_i >= 0: user rows first, then finite
// box lowers, then finite box uppers. Index order fixes pivot tie-breaking.
struct ConstraintList {
  Eigen::MatrixXd c;  // one constraint per row
  Eigen::VectorXd d;
  int num_user_rows = 0;
  std::vector<int> box_lower_index;  // constraint index per dimension, -1 if absent
  std::vector<int> box_upper_index;
};

ConstraintList build_constraints(const QpProblem& prob) {
  const int dim = prob.dim();
  ConstraintList list;
  list.num_user_rows = prob.num_rows();
  list.box_lower_index.assign(dim, -1);
  list.box_upper_index.assign(dim, -1);

  int extra = 0;
  for (int j = 0; j < dim; ++j) {
    if (prob.box_lower(j) > -kInf) ++extra;
    if (prob.box_upper(j) < kInf) ++extra;
  }

  list.c.setZero(prob.num_rows() + extra, dim);
  list.d.setZero(prob.num_rows() + extra);
  if (prob.num_rows() > 0) {
    list.c.topRows(prob.num_rows()) = prob.row_a;
    list.d.head(prob.num_rows()) = prob.row_b;
  }
  int idx = prob.num_rows();
  for (int j = 0; j < dim; ++j) {
    if (prob.box_lower(j) > -kInf) {
      list.c(idx, j) = 1.0;
      list.d(idx) = -prob.box_lower(j);
      list.box_lower_index[j] = idx++;
    }
  }
  for (int j = 0; j < dim; ++j) {
    if (prob.box_upper(j) < kInf) {
      list.c(idx, j) = -1.0;
      list.d(idx) = prob.box_upper(j);
      list.box_upper_index[j] = idx++;
    }
  }
  return list;
}

}  // namespace

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

void QpProblem::add_row(const Eigen::RowVectorXd& a, double b) {
  const int nr = num_rows();
  row_a.conservativeResize(nr + 1, dim());
  row_b.conservativeResize(nr + 1);
  row_a.row(nr) = a;
  row_b(nr) = b;
}

double QpProblem::objective(const Eigen::VectorXd& z) const {
  return 0.5 * z.dot(quad * z) + lin.dot(z) + constant;
}

void QpProblem::validate() const {
  const int d = dim();
  if (d <= 0 || d > 16) throw std::invalid_argument("QpProblem: dim must be in [1, 16]");
  if (quad.cols() != d || lin.size() != d) throw std::invalid_argument("QpProblem: size mismatch");
  if ((quad - quad.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + quad.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("QpProblem: quad not symmetric");
  if (box_lower.size() != d || box_upper.size() != d)
    throw std::invalid_argument("QpProblem: box size mismatch");
  for (int j = 0; j < d; ++j) {
    if (box_lower(j) > -kInf && box_upper(j) < kInf && box_lower(j) > box_upper(j))
      throw std::invalid_argument("QpProblem: box_lower > box_upper");
  }
  if (row_a.rows() != row_b.size()) throw std::invalid_argument("QpProblem: row size mismatch");
  if (row_a.rows() > 0 && row_a.cols() != d) throw std::invalid_argument("QpProblem: row dim mismatch");
}

QpSolution solve_qp(const QpProblem& prob) {
  prob.validate();
  const int dim = prob.dim();
  const ConstraintList con = build_constraints(prob);
  const int ncon = static_cast<int>(con.c.rows());
  const int max_iter = 100 * dim;

  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (prob.quad + prob.quad.transpose()));
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("solve_qp: quad not positive definite");

  Eigen::VectorXd z = llt.solve(-prob.lin);
  std::vector<int> active;          // constraint indices
  Eigen::VectorXd duals = Eigen::VectorXd::Zero(ncon);

  auto finish = [&](QpStatus status) {
    QpSolution sol;
    sol.z = z;
    sol.status = status;
    sol.objective = prob.objective(z);
    sol.row_duals = duals.head(prob.num_rows());
    sol.box_lower_duals = Eigen::VectorXd::Zero(dim);
    sol.box_upper_duals = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < dim; ++j) {
      if (con.box_lower_index[j] >= 0) sol.box_lower_duals(j) = duals(con.box_lower_index[j]);
      if (con.box_upper_index[j] >= 0) sol.box_upper_duals(j) = duals(con.box_upper_index[j]);
    }
    for (int i : active) {
      if (i < con.num_user_rows) sol.active_set.push_back(i);
    }
    std::sort(sol.active_set.begin(), sol.active_set.end());
    return sol;
  };

  int iter = 0;
  while (true) {
    // Most violated inactive constraint; lowest index on ties.
    int p = -1;
    double worst = -kQpFeasTol;
    for (int i = 0; i < ncon; ++i) {
      bool is_active = false;
      for (int k : active) is_active |= (k == i);
      if (is_active) continue;
      const double slack = con.c.row(i).dot(z) + con.d(i);
      if (slack < worst) {
        worst = slack;
        p = i;
      }
    }
    if (p < 0) {
      QpSolution sol = finish(QpStatus::optimal);
      sol.iterations = iter;
      return sol;
    }

    const Eigen::VectorXd np = con.c.row(p).transpose();
    double up = 0.0;  // dual of the incoming constraint

    while (true) {
      if (++iter > max_iter) {
        QpSolution sol = finish(QpStatus::max_iter);
        sol.iterations = iter;
        return sol;
      }

      // Directions in the Cholesky-transformed metric: with y the component
      // of L^{-1} np orthogonal to the transformed active normals, the primal
      // direction is dz = L^{-T} y and np' dz = |y|^2 exactly. A QR-based
      // projection keeps nearly parallel normals from exploding the duals.
      const int na = static_cast<int>(active.size());
      const Eigen::VectorXd np_t = llt.matrixL().solve(np);
      Eigen::VectorXd y;
      Eigen::VectorXd r(na);
      if (na == 0) {
        y = np_t;
      } else {
        Eigen::MatrixXd nt(dim, na);
        for (int k = 0; k < na; ++k) {
          nt.col(k) = llt.matrixL().solve(con.c.row(active[k]).transpose());
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(nt);
        r = qr.solve(np_t);
        y = np_t - nt * r;
      }

      const double denom = y.squaredNorm();
      const bool have_primal_step = y.norm() > 1e-11 * (1.0 + np_t.norm());

      // Longest dual step before an active multiplier hits zero; ties break
      // on the lowest constraint index.
      double t1 = kInf;
      int blocking = -1;
      for (int k = 0; k < na; ++k) {
        if (r(k) > 1e-12) {
          const double t = duals(active[k]) / r(k);
          if (t < t1 || (t == t1 && blocking >= 0 && active[k] < active[blocking])) {
            t1 = t;
            blocking = k;
          }
        }
      }

      if (!have_primal_step) {
        if (blocking < 0) {
          // Incoming normal lies in the span of the active set with no dual
          // slack left: the constraints are inconsistent.
          QpSolution sol = finish(QpStatus::infeasible);
          sol.iterations = iter;
          return sol;
        }
        for (int k = 0; k < na; ++k) duals(active[k]) -= t1 * r(k);
        up += t1;
        duals(active[blocking]) = 0.0;
        active.erase(active.begin() + blocking);
        continue;
      }

      const Eigen::VectorXd dz = llt.matrixU().solve(y);
      const double slack_p = np.dot(z) + con.d(p);
      const double t2 = -slack_p / denom;
      const double t = std::min(t1, t2);

      z += t * dz;
      for (int k = 0; k < na; ++k) duals(active[k]) -= t * r(k);
      up += t;

      if (t2 <= t1) {
        duals(p) = up;
        active.push_back(p);
        break;  // constraint p satisfied and active; rescan
      }
      duals(active[blocking]) = 0.0;
      active.erase(active.begin() + blocking);
    }
  }
}

QpSolution brute_force_qp(const QpProblem& prob, int grid_res) {
  prob.validate();
  const int dim = prob.dim();
  if (dim > 3) throw std::invalid_argument("brute_force_qp: dim must be <= 3");
  if (grid_res < 2) throw std::invalid_argument("brute_force_qp: grid_res must be >= 2");
  for (int j = 0; j < dim; ++j) {
    if (!(prob.box_lower(j) > -kInf && prob.box_upper(j) < kInf))
      throw std::invalid_argument("brute_force_qp: finite box bounds required");
  }

  const int nr = prob.num_rows();

  // Flat copies keep the grid scan allocation-free.
  double Q[3][3] = {}, lin[3] = {}, lo[3] = {}, step[3] = {};
  for (int i = 0; i < dim; ++i) {
    lin[i] = prob.lin(i);
    lo[i] = prob.box_lower(i);
    step[i] = (prob.box_upper(i) - prob.box_lower(i)) / (grid_res - 1);
    for (int j = 0; j < dim; ++j) Q[i][j] = prob.quad(i, j);
  }
  std::vector<std::array<double, 4>> rows(nr);  // a0 a1 a2 b
  for (int i = 0; i < nr; ++i) {
    rows[i] = {0.0, 0.0, 0.0, prob.row_b(i)};
    for (int j = 0; j < dim; ++j) rows[i][j] = prob.row_a(i, j);
  }

  double best_obj = kInf;
  double best[3] = {};
  bool found = false;

  std::vector<int> idx(dim, 0);
  double zpt[3] = {};
  while (true) {
    for (int j = 0; j < dim; ++j) zpt[j] = lo[j] + step[j] * idx[j];
    bool feasible = true;
    for (int i = 0; i < nr && feasible; ++i) {
      double lhs = rows[i][3];
      for (int j = 0; j < dim; ++j) lhs += rows[i][j] * zpt[j];
      feasible = lhs >= -1e-9;
    }
    if (feasible) {
      double obj = prob.constant;
      for (int i = 0; i < dim; ++i) {
        obj += lin[i] * zpt[i];
        double qz = 0.0;
        for (int j = 0; j < dim; ++j) qz += Q[i][j] * zpt[j];
        obj += 0.5 * zpt[i] * qz;
      }
      if (obj < best_obj) {
        best_obj = obj;
        for (int j = 0; j < dim; ++j) best[j] = zpt[j];
        found = true;
      }
    }
    int axis = dim - 1;
    while (axis >= 0 && ++idx[axis] == grid_res) idx[axis--] = 0;
    if (axis < 0) break;
  }

  QpSolution sol;
  sol.row_duals = Eigen::VectorXd::Zero(nr);
  sol.box_lower_duals = Eigen::VectorXd::Zero(dim);
  sol.box_upper_duals = Eigen::VectorXd::Zero(dim);
  sol.z = Eigen::VectorXd::Zero(dim);
  if (!found) {
    sol.status = QpStatus::infeasible;
    return sol;
  }
  for (int j = 0; j < dim; ++j) sol.z(j) = best[j];
  sol.status = QpStatus::optimal;
  sol.objective = best_obj;
  return sol;
}

double kkt_residual(const QpProblem& prob, const QpSolution& sol) {
  Eigen::VectorXd res = prob.quad * sol.z + prob.lin;
  if (prob.num_rows() > 0) res -= prob.row_a.transpose() * sol.row_duals;
  res -= sol.box_lower_duals;
  res += sol.box_upper_duals;
  return res.cwiseAbs().maxCoeff();
}

}  // namespace tlc
