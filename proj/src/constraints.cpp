#include "tlc/constraints.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tlc {

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// State grid from a box: per-axis linspace, collapsed to a single point on
// degenerate axes. Lexicographic enumeration keeps reductions deterministic.
std::vector<State> state_grid(const State& lower, const State& upper,
                              const std::vector<int>& grid_res) {
  const int n = static_cast<int>(lower.size());
  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i) {
    int res = grid_res.size() == 1 ? grid_res[0] : grid_res.at(i);
    if (res < 2) throw std::invalid_argument("grid resolution must be >= 2 per axis");
    counts[i] = (upper(i) > lower(i)) ? res : 1;
  }

  std::vector<State> pts;
  std::vector<int> idx(n, 0);
  while (true) {
    State x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = counts[i] == 1
                 ? lower(i)
                 : lower(i) + (upper(i) - lower(i)) * idx[i] / (counts[i] - 1);
    }
    pts.push_back(x);
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == counts[axis]) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return pts;
}

// All corners of [lo, hi] component-wise.
std::vector<Control> box_corners(const Control& lo, const Control& hi) {
  const int q = static_cast<int>(lo.size());
  std::vector<Control> out;
  for (int mask = 0; mask < (1 << q); ++mask) {
    Control u(q);
    for (int i = 0; i < q; ++i) u(i) = (mask >> i) & 1 ? hi(i) : lo(i);
    out.push_back(u);
    if (lo == hi) break;  // degenerate box: single corner
  }
  return out;
}

}  // namespace

void EventRegion::validate() const {
  if (x_lower.size() != x_up.size()) throw std::invalid_argument("EventRegion: size mismatch");
  for (int i = 0; i < x_lower.size(); ++i) {
    if (x_lower(i) < 0.0 || x_up(i) < 0.0)
      throw std::invalid_argument("EventRegion: negative half-width");
  }
}

bool EventRegion::contains(const State& center, const State& y) const {
  for (int i = 0; i < center.size(); ++i) {
    if (y(i) < center(i) - x_lower(i) || y(i) > center(i) + x_up(i)) return false;
  }
  return true;
}

double row_normalization(int m, double delta_t) {
  if (delta_t <= 0.0) throw std::invalid_argument("row_normalization: delta_t <= 0");
  return factorial(m) / std::pow(delta_t, m);
}

LinearControlConstraint tlc_row(const LieJet& jet, double delta_t) {
  if (delta_t <= 0.0) throw std::invalid_argument("tlc_row: delta_t <= 0");

  double b = 0.0;
  double dt_pow = 1.0;  // delta_t^k / k!
  for (int k = 0; k <= jet.m; ++k) {
    if (k > 0) dt_pow *= delta_t / k;
    b += jet.h_vals[k] * dt_pow;
  }
  return {jet.lgh_m1 * dt_pow, 0.0, b};
}

LinearControlConstraint hocbf_row(const LieJet& jet, double p1, double p2) {
  if (jet.m != 2) throw std::invalid_argument("hocbf_row: requires relative degree 2");
  if (p1 <= 0.0 || p2 <= 0.0) throw std::invalid_argument("hocbf_row: penalties must be > 0");
  const double b = jet.h_vals[2] + (p1 + p2) * jet.h_vals[1] + p1 * p2 * jet.h_vals[0];
  return {jet.lgh_m1, 0.0, b};
}

double remainder_terms(const LieJet& jet, const Control& u, const Control& du,
                       double delta_t) {
  if (!jet.has_order3) throw std::invalid_argument("remainder_terms: jet lacks order-(m+1) fields");
  if (delta_t <= 0.0) throw std::invalid_argument("remainder_terms: delta_t <= 0");
  const double scale = std::pow(delta_t, jet.m + 1) / factorial(jet.m + 1);
  return (jet.h_m1 + (jet.lgh_m + jet.lflg + jet.lg2).dot(u) + jet.lgh_m1.dot(du)) * scale;
}

ControlRateBounds du_bounds(const Control& u, const ControlBounds& bounds, double delta_t) {
  if (delta_t <= 0.0) throw std::invalid_argument("du_bounds: delta_t <= 0");
  bounds.validate();
  for (int i = 0; i < u.size(); ++i) {
    if (u(i) < bounds.u_min(i) || u(i) > bounds.u_max(i))
      throw std::invalid_argument("du_bounds: u outside control bounds");
  }
  return {-(u - bounds.u_min) / delta_t, (bounds.u_max - u) / delta_t};
}

RemainderBound estimate_rmin_grid(const DynamicsModel& model, const SafetyFunction& safety,
                                  const StateBox& x_box, const ControlBounds& bounds,
                                  double delta_t, const std::vector<int>& grid_res) {
  x_box.validate();
  bounds.validate();
  if (delta_t <= 0.0) throw std::invalid_argument("estimate_rmin_grid: delta_t <= 0");

  const Control du_sup = (bounds.u_max - bounds.u_min) / delta_t;
  const auto u_corners = box_corners(bounds.u_min, bounds.u_max);
  const auto du_corners = box_corners(Control(-du_sup), du_sup);

  double raw_min = std::numeric_limits<double>::infinity();
  for (const State& x : state_grid(x_box.lower, x_box.upper, grid_res)) {
    const LieJet jet = eval_lie_jet(model, safety, x);
    for (const Control& u : u_corners) {
      for (const Control& du : du_corners) {
        raw_min = std::min(raw_min, remainder_terms(jet, u, du, delta_t));
      }
    }
  }

  RemainderBound out;
  out.r_min = raw_min * row_normalization(safety.m, delta_t);
  out.provenance = RemainderBound::Provenance::grid;
  out.grid_resolution = grid_res;
  return out;
}

LinearControlConstraint rtlc_row(const LieJet& jet, double delta_t, double r_min) {
  if (!std::isfinite(r_min)) throw std::invalid_argument("rtlc_row: non-finite r_min");
  LinearControlConstraint row = tlc_row(jet, delta_t);
  row.b += r_min;
  return row;
}

LinearControlConstraint etlc_row(const DynamicsModel& model, const SafetyFunction& safety,
                                 const State& x_center, const EventRegion& region,
                                 double delta_t, const std::vector<int>& grid_res) {
  region.validate();
  if (x_center.size() != region.x_lower.size())
    throw std::invalid_argument("etlc_row: dimension mismatch");

  std::vector<LinearControlConstraint> rows;
  for (const State& y : state_grid(x_center - region.x_lower, x_center + region.x_up, grid_res)) {
    rows.push_back(tlc_row(eval_lie_jet(model, safety, y), delta_t));
  }

  bool same_a = true;
  for (const auto& r : rows) {
    if (r.a != rows.front().a) same_a = false;
  }

  double b_min = rows.front().b;
  for (const auto& r : rows) b_min = std::min(b_min, r.b);

  if (same_a) return {rows.front().a, 0.0, b_min};

  // Coefficients vary across the grid. For one control component with a
  // consistent sign, each grid row is a half-line bound on u and the row
  // whose bound is innermost implies every other; pick it, breaking ties on
  // the smaller b.
  const int q = static_cast<int>(rows.front().a.size());
  if (q == 1) {
    bool all_neg = true, all_pos = true;
    for (const auto& r : rows) {
      if (!(r.a(0) < 0.0)) all_neg = false;
      if (!(r.a(0) > 0.0)) all_pos = false;
    }
    if (all_neg || all_pos) {
      const LinearControlConstraint* best = &rows.front();
      double best_bound = -rows.front().b / rows.front().a(0);
      for (const auto& r : rows) {
        const double bound = -r.b / r.a(0);  // feasible set: u <= bound (a<0) or u >= bound (a>0)
        const bool tighter = all_neg ? bound < best_bound : bound > best_bound;
        if (tighter || (bound == best_bound && r.b < best->b)) {
          best = &r;
          best_bound = bound;
        }
      }
      return *best;
    }
  }

  // Mixed signs: no single affine row reproduces the intersection. Return the
  // minimum-b row as the intersection approximation.
  const LinearControlConstraint* best = &rows.front();
  for (const auto& r : rows) {
    if (r.b < best->b) best = &r;
  }
  return *best;
}

LinearControlConstraint tls_row(const LieJet& jet_v, double delta_t) {
  if (delta_t <= 0.0) throw std::invalid_argument("tls_row: delta_t <= 0");
  if (jet_v.m != 1) throw std::invalid_argument("tls_row: requires relative degree 1");
  return {-jet_v.lgh_m1, 1.0, -(jet_v.h_vals[1] + jet_v.h_vals[0] / delta_t)};
}

}  // namespace tlc
