#include "tlc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tlc::cli {

namespace {

using json = nlohmann::ordered_json;
using sim::SimConfig;
using sim::SimResult;

std::string fmt(double v) {
  if (v == 0.0) return "0";  // canonicalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

RunMode mode_from_string(const std::string& s) {
  if (s == "run") return RunMode::run;
  if (s == "compare") return RunMode::compare;
  if (s == "sweep") return RunMode::sweep;
  throw UsageError("unknown mode: " + s);
}

acc::Method parse_method(const std::string& s) {
  const auto m = acc::method_from_string(s);
  if (!m) throw UsageError("unknown method: " + s);
  return *m;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<double, double>> pairs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("bad sweep pair (want delta_t:dt): " + item);
    try {
      pairs.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("bad sweep pair: " + item);
    }
  }
  return pairs;
}

void apply_config_file(const std::filesystem::path& path, RunSpec& spec) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw UsageError(std::string("malformed config JSON: ") + e.what());
  }

  auto& p = spec.config.params;
  auto num = [&](const char* key, double& target) {
    if (doc.contains(key)) target = doc.at(key).get<double>();
  };
  num("v0", p.v0);
  num("v_d", p.v_d);
  num("M", p.mass);
  num("g", p.gravity);
  num("f0", p.f0);
  num("f1", p.f1);
  num("f2", p.f2);
  num("c", p.safe_distance);
  num("c_a", p.c_a);
  num("c_d", p.c_d);
  num("delta_t", p.delta_t);
  num("dt", p.dt);
  num("p1", p.p1);
  num("p2", p.p2);
  num("p_sl", p.p_sl);
  num("horizon", spec.config.horizon);
  if (doc.contains("substeps")) spec.config.substeps = doc.at("substeps").get<int>();
  if (doc.contains("seed")) spec.config.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("method")) spec.config.method = parse_method(doc.at("method").get<std::string>());
  if (doc.contains("mode")) spec.mode = mode_from_string(doc.at("mode").get<std::string>());
  if (doc.contains("out")) spec.output_dir = doc.at("out").get<std::string>();
  if (doc.contains("freeze_timing")) spec.freeze_timing = doc.at("freeze_timing").get<bool>();
  if (doc.contains("x0")) {
    const auto x0 = doc.at("x0");
    spec.config.x0 = {x0.at(0).get<double>(), x0.at(1).get<double>()};
  }
  if (doc.contains("x_lower")) {
    const auto v = doc.at("x_lower");
    p.region.x_lower = Eigen::Vector2d(v.at(0).get<double>(), v.at(1).get<double>());
  }
  if (doc.contains("x_up")) {
    const auto v = doc.at("x_up");
    p.region.x_up = Eigen::Vector2d(v.at(0).get<double>(), v.at(1).get<double>());
  }
  if (doc.contains("sweep_deltas")) {
    spec.sweep_deltas.clear();
    for (const auto& pair : doc.at("sweep_deltas")) {
      spec.sweep_deltas.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  }
}

json summary_json(const acc::Method method, const SimConfig& config, const SimResult& result,
                  bool freeze_timing) {
  json j;
  j["method"] = acc::to_string(method);
  j["delta_t"] = config.params.delta_t;
  j["dt"] = config.params.dt;
  j["min_h"] = result.summary.min_h;
  j["mean_solve_time_s"] = freeze_timing ? 0.0 : result.summary.mean_solve_time_s;
  j["std_solve_time_s"] = freeze_timing ? 0.0 : result.summary.std_solve_time_s;
  j["infeasible_steps"] = result.summary.infeasible_steps;
  j["triggers"] = result.summary.triggers;
  return j;
}

void print_table(const std::vector<std::pair<std::string, json>>& rows) {
  std::printf("%-34s %14s %24s\n", "Method", "min h(x)", "Compute time (s)");
  std::printf("%s\n", std::string(74, '-').c_str());
  for (const auto& [label, j] : rows) {
    std::printf("%-34s %14.6g %12.6g +- %-9.3g\n", label.c_str(),
                j.at("min_h").get<double>(), j.at("mean_solve_time_s").get<double>(),
                j.at("std_solve_time_s").get<double>());
  }
}

std::string method_label(acc::Method m) {
  switch (m) {
    case acc::Method::hocbf: return "Time-driven HOCBF";
    case acc::Method::tlc: return "Time-driven TLC";
    case acc::Method::etlc: return "Event-driven TLC";
    case acc::Method::rtlc: return "rTLC";
  }
  return "?";
}

}  // namespace

RunSpec parse_run_spec(const std::vector<std::string>& args) {
  RunSpec spec;
  spec.sweep_deltas = {{0.85, 0.1}, {0.5, 0.5}, {0.1, 0.1}};

  // Config file first so that flags override its values.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a path");
      apply_config_file(args[i + 1], spec);
    }
  }

  CLI::App app{"Taylor-Lagrange safety-filter ACC harness"};
  std::string method_s, mode_s, out_s, config_s, pairs_s;
  auto& p = spec.config.params;
  app.add_option("--method", method_s, "hocbf|tlc|etlc|rtlc");
  app.add_option("--delta-t", p.delta_t, "constraint horizon (s)");
  app.add_option("--dt", p.dt, "control application interval (s)");
  app.add_option("--horizon", spec.config.horizon, "simulation horizon (s)");
  app.add_option("--substeps", spec.config.substeps, "integrator substeps per dt");
  app.add_option("--p1", p.p1, "HOCBF penalty p1");
  app.add_option("--p2", p.p2, "HOCBF penalty p2");
  app.add_option("--p-sl", p.p_sl, "stability slack weight");
  app.add_option("--config", config_s, "JSON config file");
  app.add_option("--mode", mode_s, "run|compare|sweep");
  app.add_option("--out", out_s, "output directory");
  app.add_option("--pairs", pairs_s, "sweep pairs, e.g. 0.85:0.1,0.5:0.5");
  app.add_flag("--freeze-timing", spec.freeze_timing,
               "write zeros for timing fields (byte-stable outputs)");

  std::vector<const char*> argv;
  argv.push_back("tlc-acc");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::flush;
    throw HelpRequested("help");
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (!method_s.empty()) spec.config.method = parse_method(method_s);
  if (!mode_s.empty()) spec.mode = mode_from_string(mode_s);
  if (!out_s.empty()) spec.output_dir = out_s;
  if (!pairs_s.empty()) spec.sweep_deltas = parse_pairs(pairs_s);

  try {
    spec.config.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (spec.mode == RunMode::sweep) {
    if (spec.sweep_deltas.empty()) throw UsageError("sweep mode requires sweep pairs");
    for (const auto& [delta_t, dt] : spec.sweep_deltas) {
      if (!(dt > 0.0) || !(delta_t > 0.0) || dt > delta_t + 1e-12)
        throw UsageError("sweep pair violates dt <= delta_t");
    }
  }
  return spec;
}

void write_run_outputs(const RunSpec& spec, const SimConfig& config, const SimResult& result,
                       const std::string& stem) {
  std::filesystem::create_directories(spec.output_dir);

  {
    std::ofstream csv(spec.output_dir / (stem + "_traj.csv"));
    csv << "t,v,z,u,delta,h,row_lhs,qp_status,solve_time_s\n";
    for (const auto& s : result.trajectory.samples) {
      csv << fmt(s.t) << ',' << fmt(s.v) << ',' << fmt(s.z) << ',' << fmt(s.u) << ','
          << fmt(s.delta) << ',' << fmt(s.h) << ',' << fmt(s.safety_row_lhs) << ','
          << (s.terminal ? "terminal" : to_string(s.qp_status)) << ','
          << fmt(spec.freeze_timing ? 0.0 : s.solve_time_s) << '\n';
    }
  }
  {
    std::ofstream csv(spec.output_dir / (stem + "_dense.csv"));
    csv << "t_sub,h_sub\n";
    for (const auto& [t, h] : result.trajectory.substep_h) {
      csv << fmt(t) << ',' << fmt(h) << '\n';
    }
  }
  {
    std::ofstream js(spec.output_dir / (stem + "_summary.json"));
    js << summary_json(config.method, config, result, spec.freeze_timing).dump(2) << '\n';
  }
}

int run_cli(const std::vector<std::string>& args) {
  RunSpec spec;
  try {
    spec = parse_run_spec(args);
  } catch (const HelpRequested&) {
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    std::filesystem::create_directories(spec.output_dir);

    if (spec.mode == RunMode::run) {
      const SimResult result = sim::run_simulation(spec.config);
      write_run_outputs(spec, spec.config, result, acc::to_string(spec.config.method));
      json j = summary_json(spec.config.method, spec.config, result, spec.freeze_timing);
      print_table({{method_label(spec.config.method), j}});
      return 0;
    }

    if (spec.mode == RunMode::compare) {
      const acc::Method methods[] = {acc::Method::hocbf, acc::Method::tlc,
                                     acc::Method::etlc, acc::Method::rtlc};
      std::vector<std::pair<std::string, json>> rows;
      json combined = json::array();
      bool failed = false;
      for (acc::Method m : methods) {
        SimConfig config = spec.config;
        config.method = m;
        try {
          const SimResult result = sim::run_simulation(config);
          write_run_outputs(spec, config, result, acc::to_string(m));
          json j = summary_json(m, config, result, spec.freeze_timing);
          rows.emplace_back(method_label(m), j);
          combined.push_back(std::move(j));
        } catch (const std::exception& e) {
          std::cerr << acc::to_string(m) << " failed: " << e.what() << "\n";
          failed = true;
        }
      }
      std::ofstream js(spec.output_dir / "summary.json");
      js << combined.dump(2) << '\n';
      print_table(rows);
      return failed ? 1 : 0;
    }

    // sweep
    std::vector<std::pair<std::string, json>> rows;
    json combined = json::array();
    for (const auto& [delta_t, dt] : spec.sweep_deltas) {
      SimConfig config = spec.config;
      config.params.delta_t = delta_t;
      config.params.dt = dt;
      config.validate();
      const SimResult result = sim::run_simulation(config);
      const std::string stem = std::string(acc::to_string(config.method)) + "_d" +
                               fmt_short(delta_t) + "_s" + fmt_short(dt);
      write_run_outputs(spec, config, result, stem);
      json j = summary_json(config.method, config, result, spec.freeze_timing);
      rows.emplace_back(method_label(config.method) + std::string(" delta_t=") +
                            fmt_short(delta_t) + " dt=" + fmt_short(dt),
                        j);
      combined.push_back(std::move(j));
    }
    std::ofstream js(spec.output_dir / "summary.json");
    js << combined.dump(2) << '\n';
    print_table(rows);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tlc::cli
