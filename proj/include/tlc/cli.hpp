#ifndef TLC_CLI_HPP
#define TLC_CLI_HPP

// Command-line harness: single-method runs, four-way comparisons, and
// (delta_t, dt) sweeps, exporting trajectories as CSV and summaries as JSON.

#include "tlc/sim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tlc::cli {

enum class RunMode { run, compare, sweep };

struct RunSpec {
  RunMode mode = RunMode::run;
  sim::SimConfig config;
  std::vector<std::pair<double, double>> sweep_deltas;  // (delta_t, dt) pairs
  std::filesystem::path output_dir = "out";
  bool freeze_timing = false;  // zero all timing fields for byte-stable outputs
};

/// Thrown on malformed flags or config values; the CLI maps it to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown after printing --help; the CLI maps it to exit code 0.
struct HelpRequested : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse flags (and an optional JSON config file given via --config) into a
/// RunSpec. Config-file values are applied first, then overridden by flags;
/// everything else keeps the benchmark defaults.
RunSpec parse_run_spec(const std::vector<std::string>& args);

/// Write trajectory CSV (t,v,z,u,delta,h,row_lhs,qp_status,solve_time_s), the
/// dense-audit CSV (t_sub,h_sub), and the summary JSON for one finished run.
void write_run_outputs(const RunSpec& spec, const sim::SimConfig& config,
                       const sim::SimResult& result, const std::string& stem);

/// Parse the arguments and execute the resulting RunSpec end to end.
/// Returns the process exit code: 0 success, 1 simulation error, 2 usage error.
int run_cli(const std::vector<std::string>& args);

}  // namespace tlc::cli

#endif  // TLC_CLI_HPP
