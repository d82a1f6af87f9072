// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line with the measured values. Methods run on the benchmark
// configuration; the baselines use the wide-horizon setting (delta_t = 0.85,
// dt = 0.1) they are reported with, rTLC the (delta_t, dt) pairs under test.

#include <doctest.h>

#include "tlc/cli.hpp"
#include "tlc/sim.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace tlc;
using namespace tlc::acc;

namespace {

const AccParams kParams;

const sim::SimResult& cached_run(Method m, double delta_t, double dt) {
  static std::map<std::string, sim::SimResult> cache;
  const std::string key =
      std::string(to_string(m)) + "/" + std::to_string(delta_t) + "/" + std::to_string(dt);
  auto it = cache.find(key);
  if (it == cache.end()) {
    sim::SimConfig config;
    config.method = m;
    config.params.delta_t = delta_t;
    config.params.dt = dt;
    it = cache.emplace(key, sim::run_simulation(config)).first;
  }
  return it->second;
}

void report(int n, const std::string& desc, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", n, desc.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: minimum-h sign pattern across the four methods") {
  const double hocbf = cached_run(Method::hocbf, 0.85, 0.1).summary.min_h;
  const double tlc = cached_run(Method::tlc, 0.85, 0.1).summary.min_h;
  const double etlc = cached_run(Method::etlc, 0.85, 0.1).summary.min_h;
  const double rtlc = cached_run(Method::rtlc, 0.1, 0.1).summary.min_h;

  const bool pass = (rtlc >= 0.0 && rtlc <= 0.5) && (tlc >= -2.0 && tlc <= -0.05) &&
                    (hocbf >= -0.01 && hocbf <= 0.5) && (etlc >= 0.0 && etlc <= 2.0);
  report(1, "minimum-h sign pattern across methods", pass,
         "hocbf=" + fmt(hocbf) + " tlc=" + fmt(tlc) + " etlc=" + fmt(etlc) +
             " rtlc=" + fmt(rtlc));
  CHECK(rtlc >= 0.0);
  CHECK(rtlc <= 0.5);
  CHECK(tlc >= -2.0);
  CHECK(tlc <= -0.05);
  CHECK(hocbf >= -0.01);
  CHECK(hocbf <= 0.5);
  CHECK(etlc >= 0.0);
  CHECK(etlc <= 2.0);
}

TEST_CASE("criterion 2: rTLC conservativeness ordering over (delta_t, dt)") {
  const double r085 = cached_run(Method::rtlc, 0.85, 0.1).summary.min_h;
  const double r05 = cached_run(Method::rtlc, 0.5, 0.5).summary.min_h;
  const double r01 = cached_run(Method::rtlc, 0.1, 0.1).summary.min_h;

  const bool pass = r085 > r05 && r05 > r01 && r01 >= 0.0 && r085 > 3.0 && r01 < 0.5;
  report(2, "rTLC conservativeness ordering", pass,
         "min_h(0.85,0.1)=" + fmt(r085) + " > min_h(0.5,0.5)=" + fmt(r05) +
             " > min_h(0.1,0.1)=" + fmt(r01));
  CHECK(r085 > r05);
  CHECK(r05 > r01);
  CHECK(r01 >= 0.0);
  CHECK(r085 > 3.0);
  CHECK(r01 < 0.5);
}

TEST_CASE("criterion 3: hard safety invariant on every dense substep") {
  double worst = 1e300;
  for (auto [delta_t, dt] : {std::pair{0.1, 0.1}, {0.5, 0.5}, {0.85, 0.1}}) {
    for (const auto& [t, h] : cached_run(Method::rtlc, delta_t, dt).trajectory.substep_h) {
      worst = std::min(worst, h);
    }
  }
  const bool pass = worst >= -1e-9;
  report(3, "rTLC dense substep h stays above -1e-9", pass, "worst=" + fmt(worst));
  CHECK(worst >= -1e-9);
}

TEST_CASE("criterion 4: first-order rows degenerate to the linear class-K form") {
  std::mt19937_64 rng(20240820);
  std::uniform_real_distribution<double> coef(-10.0, 10.0), dts(0.01, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    LieJet jet;
    jet.m = 1;
    jet.h_vals = {coef(rng), coef(rng)};
    jet.lgh_m1 = Eigen::RowVectorXd::Constant(1, coef(rng));
    const double dt = dts(rng);
    const LinearControlConstraint row = tlc_row(jet, dt).scaled(1.0 / dt);
    worst = std::max(worst, std::abs(row.a(0) - jet.lgh_m1(0)));
    worst = std::max(worst, std::abs(row.b - (jet.h_vals[1] + jet.h_vals[0] / dt)));
  }
  const bool pass = worst <= 1e-12;
  report(4, "m=1 degeneration identity over 1000 random jets", pass,
         "max coefficient discrepancy=" + fmt(worst));
  CHECK(worst <= 1e-12);
}

TEST_CASE("criterion 5: remainder bound soundness") {
  std::mt19937_64 rng(20240821);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double umin = kParams.u_min(), umax = kParams.u_max();
  const double dt = 0.1;
  const double norm = row_normalization(2, dt);
  const double du_sup = (umax - umin) / dt;

  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const double v = 30.0 * unit(rng);
    const LieJet jet = acc_lie_jet(kParams, {v, 120.0 * unit(rng)});
    const double u = umin + (umax - umin) * unit(rng);
    const double du = -du_sup + 2.0 * du_sup * unit(rng);
    const double r = remainder_terms(jet, Eigen::VectorXd::Constant(1, u),
                                     Eigen::VectorXd::Constant(1, du), dt) *
                     norm;
    if (r < acc_rmin_closed_form(kParams, v, dt).r_min) ++violations;
  }

  const auto model = acc_model(kParams);
  const auto safety = acc_safety(kParams);
  StateBox box;
  box.lower = Eigen::Vector2d(0.0, 0.0);
  box.upper = Eigen::Vector2d(30.0, 120.0);
  bool chain_below_grid = true;
  std::string grid_detail;
  for (double horizon : {0.1, 0.5, 0.85}) {
    const double grid =
        estimate_rmin_grid(model, safety, box, kParams.control_bounds(), horizon, {50, 50})
            .r_min;
    const double chain = acc_rmin_closed_form(kParams, box.upper(0), horizon).r_min;
    chain_below_grid = chain_below_grid && chain <= grid;
    grid_detail += " dt=" + fmt(horizon) + ":" + fmt(chain) + "<=" + fmt(grid);
  }

  const bool pass = violations == 0 && chain_below_grid;
  report(5, "remainder bound soundness", pass,
         "violations=" + std::to_string(violations) + grid_detail);
  CHECK(violations == 0);
  CHECK(chain_below_grid);
}

TEST_CASE("criterion 6: order-3 contraction of the Taylor prediction error") {
  std::mt19937_64 rng(20240822);
  std::uniform_real_distribution<double> vs(5.0, 30.0), zs(20.0, 120.0), unit(0.0, 1.0);
  bool pass = true;
  double lo = 1e300, hi = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const AccState x{vs(rng), zs(rng)};
    const double u = unit(rng) < 0.5 ? -4000.0 - 3000.0 * unit(rng)
                                     : 3000.0 + 2000.0 * unit(rng);
    const LieJet jet = acc_lie_jet(kParams, x);
    auto taylor_error = [&](double h) {
      const auto end = sim::integrate_step(kParams, x, u, h, 400).first;
      return std::abs((end.z - kParams.safe_distance) -
                      tlc_row(jet, h).lhs(Eigen::VectorXd::Constant(1, u)));
    };
    const double e1 = taylor_error(0.08), e2 = taylor_error(0.04), e3 = taylor_error(0.02);
    for (double ratio : {e1 / e2, e2 / e3}) {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      pass = pass && ratio >= 6.0 && ratio <= 10.0;
    }
  }
  report(6, "Taylor prediction error contracts by 6-10x per halving", pass,
         "ratio range [" + fmt(lo) + ", " + fmt(hi) + "]");
  CHECK(pass);
}

TEST_CASE("criterion 7: QP solver agrees with the grid oracle") {
  std::mt19937_64 rng(20240823);
  std::uniform_real_distribution<double> unit(0.0, 1.0), angle(0.0, 6.283185307179586);

  double worst_gap = 0.0, worst_kkt = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double l1 = 0.5 + 1.5 * unit(rng), l2 = 0.5 + 1.5 * unit(rng);
    const double th = angle(rng);
    Eigen::Matrix2d rot;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    QpProblem p;
    p.quad = rot * Eigen::Vector2d(l1, l2).asDiagonal() * rot.transpose();
    const Eigen::Vector2d z0(-0.6 + 1.2 * unit(rng), -0.6 + 1.2 * unit(rng));
    p.lin = -p.quad * z0;
    p.box_lower = Eigen::Vector2d(-1.0, -1.0);
    p.box_upper = Eigen::Vector2d(1.0, 1.0);
    const int rows = 1 + static_cast<int>(unit(rng) * 2.0);
    for (int i = 0; i < rows; ++i) {
      Eigen::RowVector2d a(std::cos(angle(rng)), std::sin(angle(rng)));
      const double margin = (trial % 3 == 0 && i == 0) ? 0.0 : 0.05 + unit(rng);
      p.add_row(a, margin - a.dot(z0));
    }

    const QpSolution sol = solve_qp(p);
    if (sol.status != QpStatus::optimal) continue;
    ++solved;
    worst_kkt = std::max(worst_kkt, kkt_residual(p, sol));
    const QpSolution brute = brute_force_qp(p, 2000);
    worst_gap = std::max(worst_gap, std::abs(sol.objective - brute.objective));
  }

  const bool pass = solved == 1000 && worst_gap <= 1e-4 && worst_kkt <= 1e-6;
  report(7, "QP oracle equivalence on 1000 random problems", pass,
         "max objective gap=" + fmt(worst_gap) + " max KKT residual=" + fmt(worst_kkt));
  CHECK(solved == 1000);
  CHECK(worst_gap <= 1e-4);
  CHECK(worst_kkt <= 1e-6);
}

TEST_CASE("criterion 8: closed-form jets match finite differences on the state grid") {
  const auto model = acc_model(kParams);
  const auto safety = acc_safety(kParams);
  std::vector<State> samples;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      samples.push_back(Eigen::Vector2d(5.0 + 25.0 * i / 19.0, 5.0 + 115.0 * j / 19.0));
    }
  }
  const OracleReport rep = validate_oracle(model, safety, samples, 1e-3);
  double worst = 0.0;
  for (double e : rep.max_abs_err) worst = std::max(worst, e);
  report(8, "Lie oracle vs finite differences on 20x20 grid", rep.pass,
         "max discrepancy=" + fmt(worst));
  CHECK(rep.pass);
}

TEST_CASE("criterion 9: per-step QP solve time stays under 10 ms") {
  // Time fresh solves on the benchmark scenario rather than reusing the
  // cached run, so this criterion reflects live wall-clock behaviour.
  sim::SimConfig config;
  config.method = Method::rtlc;
  const sim::SimResult r = sim::run_simulation(config);
  const double mean = r.summary.mean_solve_time_s;
  const bool pass = mean < 0.010;
  report(9, "mean per-step QP solve time below 10 ms", pass,
         "mean=" + fmt(mean * 1e3) + " ms, std=" + fmt(r.summary.std_solve_time_s * 1e3) +
             " ms");
  CHECK(mean < 0.010);
}

TEST_CASE("criterion 10: compare runs are byte-identical") {
  const auto base = std::filesystem::temp_directory_path() / "tlc_acceptance_compare";
  const auto dir_a = base / "a";
  const auto dir_b = base / "b";
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(dir_a);
  std::filesystem::create_directories(dir_b);

  auto invoke = [&](const std::filesystem::path& out) {
    const std::string cmd = std::string(TLC_CLI_BINARY) +
                            " --mode compare --freeze-timing --out " + out.string() +
                            " > " + (out / "stdout.txt").string();
    return std::system(cmd.c_str());
  };
  const int rc_a = invoke(dir_a);
  const int rc_b = invoke(dir_b);

  bool pass = rc_a == 0 && rc_b == 0;
  std::string mismatch = "none";
  for (const char* name :
       {"hocbf_traj.csv", "tlc_traj.csv", "etlc_traj.csv", "rtlc_traj.csv",
        "hocbf_dense.csv", "tlc_dense.csv", "etlc_dense.csv", "rtlc_dense.csv",
        "hocbf_summary.json", "tlc_summary.json", "etlc_summary.json", "rtlc_summary.json",
        "summary.json"}) {
    const std::string a = slurp(dir_a / name);
    const std::string b = slurp(dir_b / name);
    if (a.empty() || a != b) {
      pass = false;
      mismatch = name;
    }
  }
  report(10, "two identical compare invocations produce identical bytes", pass,
         "exit codes " + std::to_string(rc_a) + "/" + std::to_string(rc_b) +
             ", first mismatch: " + mismatch);
  CHECK(pass);
}
