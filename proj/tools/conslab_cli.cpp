// conslab: simulate consensus protocols on switched networks, run the
// benchmark sweeps and verify connectivity properties.
//
// Exit codes: 0 ok, 1 input error, 2 divergence, 3 no settle,
// 4 verification failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "conslab/benchmark.hpp"
#include "conslab/graph.hpp"
#include "conslab/io.hpp"
#include "conslab/simulator.hpp"
#include "conslab/version.hpp"

namespace fs = std::filesystem;
using namespace conslab;
using io::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kDiverged = 2,
  kNoSettle = 3,
  kVerifyFailed = 4,
};

struct LcgFlags {
  LcgConfig cfg;
  void add_to(CLI::App* app) {
    app->add_option("--lcg-r", cfg.r, "LCG multiplier")->capture_default_str();
    app->add_option("--lcg-s", cfg.s, "LCG increment")->capture_default_str();
    app->add_option("--lcg-M", cfg.modulus, "LCG modulus")->capture_default_str();
    app->add_option("--lcg-l", cfg.l, "initial-condition scale l")->capture_default_str();
    app->add_option("--lcg-m", cfg.m, "initial-condition shift m")->capture_default_str();
    app->add_option("--lcg-z0", cfg.z0, "LCG seed z0")->capture_default_str();
  }
};

json lcg_to_json(const LcgConfig& c) {
  return json{{"r", c.r}, {"s", c.s}, {"M", c.modulus}, {"l", c.l}, {"m", c.m}, {"z0", c.z0}};
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("CONSENSUS_LAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring CONSENSUS_LAB_THREADS=" << env << "\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io::InputError("cannot create output directory " + dir.string());
}

std::string csv_of(auto&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string network;
  std::string protocol;
  std::string x0_file;
  bool x0_lcg = false;
  LcgFlags lcg;
  double dt = 1e-4;
  double t_end = 10.0;
  std::optional<double> epsilon;
  std::size_t record_stride = 1;
  bool per_node = false;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const DynamicNetwork net = io::load_network(a.network);
  const Protocol protocol = io::load_protocol(a.protocol);

  std::vector<double> x0;
  json x0_meta;
  if (!a.x0_file.empty()) {
    x0 = io::load_x0(a.x0_file);
    x0_meta = json{{"source", "file"}, {"path", a.x0_file}};
  } else {
    x0 = lcg_initial_conditions(a.lcg.cfg, net.vertex_count());
    x0_meta = json{{"source", "lcg"}, {"lcg", lcg_to_json(a.lcg.cfg)}};
  }
  if (x0.size() != net.vertex_count()) {
    throw io::InputError("initial state has " + std::to_string(x0.size()) +
                         " entries but the network has " + std::to_string(net.vertex_count()) +
                         " vertices");
  }

  SimConfig cfg;
  cfg.dt = a.dt;
  cfg.t_end = a.t_end;
  cfg.stop_epsilon = a.epsilon;
  cfg.record_stride = a.record_stride;
  cfg.record_node_effort = a.per_node;
  try {
    validate_config(cfg, net.signal());
  } catch (const std::invalid_argument& err) {
    throw io::InputError(err.what());
  }

  const fs::path out(a.out);
  prepare_out_dir(out);
  const Trajectory traj = simulate(net, protocol, x0, cfg);

  io::write_text_file(out / "trajectory.csv",
                      csv_of([&](std::ostream& s) { io::write_trajectory_csv(s, traj); }));
  io::write_text_file(out / "metrics.csv", csv_of([&](std::ostream& s) {
                        io::write_metrics_csv(s, traj.metrics, a.per_node);
                      }));
  io::write_text_file(out / "events.csv",
                      csv_of([&](std::ostream& s) { io::write_events_csv(s, traj.switches); }));

  const bool settled = !a.epsilon || traj.settling_time.has_value();
  json meta{{"tool", "conslab"},
            {"version", kVersion},
            {"command", "simulate"},
            {"integrator", "explicit_euler"},
            {"dt", cfg.dt},
            {"t_end", cfg.t_end},
            {"epsilon", a.epsilon ? json(*a.epsilon) : json(nullptr)},
            {"record_stride", cfg.record_stride},
            {"protocol", io::protocol_to_json(protocol)},
            {"signal", io::signal_to_json(net.signal())},
            {"graph_count", net.family().size()},
            {"n", net.vertex_count()},
            {"x0", x0_meta},
            {"steps", traj.steps},
            {"stopped_early", traj.stopped_early},
            {"final_time", traj.times.back()},
            {"final_V", traj.final_v()},
            {"final_E_tot", traj.final_effort()},
            {"settling_time", traj.settling_time ? json(*traj.settling_time) : json(nullptr)},
            {"E_tot_at_settling",
             traj.effort_at_settling ? json(*traj.effort_at_settling) : json(nullptr)}};
  io::write_text_file(out / "meta.json", meta.dump(2) + "\n");

  std::cout << "final V = " << io::format_double(traj.final_v()) << " at t = "
            << io::format_double(traj.times.back()) << "\n";
  if (a.epsilon) {
    if (!settled) {
      std::cout << "not settled below epsilon = " << io::format_double(*a.epsilon) << "\n";
      return kNoSettle;
    }
    std::cout << "settled at t = " << io::format_double(*traj.settling_time)
              << ", E_tot = " << io::format_double(*traj.effort_at_settling) << "\n";
  }
  return kOk;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  int experiment = 1;
  std::vector<std::size_t> sizes{25};
  double dt = 1e-4;
  double t_end = 600.0;
  std::string chords = "1,h";
  LcgFlags lcg;
  std::string out;
};

json calibration_to_json(const Calibration& c) {
  return json{{"direction", to_string(c.direction)},
              {"n", c.n},
              {"gain", c.gain},
              {"settling_time", c.settling_time},
              {"E_tot", c.effort},
              {"target_V", c.target_v},
              {"target_t", c.target_t}};
}

int run_benchmark(const BenchmarkArgs& a) {
  if (a.experiment != 1 && a.experiment != 2) throw io::InputError("--experiment must be 1 or 2");
  if (std::find(a.sizes.begin(), a.sizes.end(), kCalibrationSize) == a.sizes.end()) {
    throw io::InputError("--sizes must include 25: gains are calibrated on the 25-node network");
  }
  for (std::size_t n : a.sizes)
    if (n < 5) throw io::InputError("benchmark sizes must be >= 5");

  SimConfig cfg;
  cfg.dt = a.dt;
  cfg.t_end = a.t_end;
  try {
    validate_config(cfg, benchmark_topology(kCalibrationSize).signal());
  } catch (const std::invalid_argument& err) {
    throw io::InputError(err.what());
  }

  const fs::path out(a.out);
  prepare_out_dir(out);
  const ChordMember chords =
      a.chords == "h" ? ChordMember::kOffsetH : ChordMember::kOffsetsOneAndH;
  const auto experiment = static_cast<Experiment>(a.experiment);
  const ExperimentResult result =
      run_experiment(experiment, a.sizes, cfg, a.lcg.cfg, chords, thread_budget());

  io::write_text_file(out / "results.csv", csv_of([&](std::ostream& s) {
                        io::write_results_csv(s, result.rows);
                      }));

  json calibrations = json::array();
  for (const Calibration& c : result.calibrations) calibrations.push_back(calibration_to_json(c));
  json meta{{"tool", "conslab"},
            {"version", kVersion},
            {"command", "benchmark"},
            {"experiment", a.experiment},
            {"protocol", experiment_protocol_name(experiment)},
            {"sizes", a.sizes},
            {"dt", cfg.dt},
            {"t_end", cfg.t_end},
            {"epsilon", kBenchmarkEpsilon},
            {"lcg", lcg_to_json(a.lcg.cfg)},
            {"topology",
             {{"X0", "circulant offsets {1}"},
              {"X1", "circulant offsets {" + to_string(chords) + "}"},
              {"h_rule", "largest h in [1, floor(n/2)] with gcd(h, n) = 1"},
              {"signal", "floor(5 t) mod 2"},
              {"weights", 1.0}}},
            {"calibration",
             {{"n", kCalibrationSize},
              {"target_V", kBenchmarkEpsilon},
              {"target_t", kCalibrationTime},
              {"method", "geometric bisection on [1e-3, 1e3], 48 iterations"},
              {"results", calibrations}}}};
  io::write_text_file(out / "meta.json", meta.dump(2) + "\n");

  bool all_settled = true;
  for (const BenchmarkRow& r : result.rows) {
    std::cout << "n=" << r.n << " " << to_string(r.direction) << " k=" << io::format_double(r.k)
              << " T=" << (r.settling_time ? io::format_double(*r.settling_time) : "none")
              << " E_tot=" << io::format_double(r.effort) << "\n";
    all_settled = all_settled && r.settling_time.has_value();
  }
  return all_settled ? kOk : kNoSettle;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string network;
  std::string graph;
  std::optional<double> tau;
  std::optional<double> horizon;
  bool spectral = false;
};

bool report_spectral(const WeightedDigraph& g, const std::string& prefix) {
  if (!g.undirected()) {
    std::cout << prefix << "lambda2: n/a (directed)\n";
    return true;
  }
  const double lambda2 = algebraic_connectivity(g);
  std::cout << prefix << "lambda2: " << io::format_double(lambda2) << "\n";
  if (g.vertex_count() > kEdgeConnectivityMaxVertices) return true;
  const std::size_t kappa1 = edge_connectivity(g);
  const std::size_t n = g.vertex_count();
  if (n >= 2 && g.edges().size() == n * (n - 1)) {
    // K_n has lambda2 = n but kappa1 = n - 1; the bound needs a non-complete graph.
    std::cout << prefix << "kappa1: " << kappa1 << "\n"
              << prefix << "lambda2 <= kappa1: n/a (complete graph)\n";
    return true;
  }
  const bool ok = lambda2 <= static_cast<double>(kappa1) + 1e-9;
  std::cout << prefix << "kappa1: " << kappa1 << "\n"
            << prefix << "lambda2 <= kappa1: " << (ok ? "PASS" : "FAIL") << "\n";
  return ok;
}

int run_verify(const VerifyArgs& a) {
  bool pass = true;
  if (!a.graph.empty()) {
    const WeightedDigraph g = io::load_graph(a.graph);
    std::cout << "n: " << g.vertex_count() << "\n"
              << "undirected: " << (g.undirected() ? "true" : "false") << "\n"
              << "connected: " << (is_connected(g) ? "true" : "false") << "\n"
              << "components: " << weak_components(g).size() << "\n";
    if (a.spectral) pass = report_spectral(g, "") && pass;
  }
  if (!a.network.empty()) {
    const DynamicNetwork net = io::load_network(a.network);
    for (std::size_t i = 0; i < net.family().size(); ++i) {
      const WeightedDigraph& g = net.family()[i];
      std::cout << "graph " << i << ": connected=" << (is_connected(g) ? "true" : "false")
                << " components=" << weak_components(g).size() << "\n";
      if (a.spectral) pass = report_spectral(g, "graph " + std::to_string(i) + " ") && pass;
    }
    if (a.tau) {
      const double horizon = a.horizon.value_or(3.0 * *a.tau);
      JointConnectivity jc;
      try {
        jc = is_tau_jointly_connected(net, *a.tau, horizon);
      } catch (const std::invalid_argument& err) {
        throw io::InputError(err.what());
      }
      std::cout << "tau-joint-connectivity (tau=" << io::format_double(*a.tau)
                << ", horizon=" << io::format_double(horizon) << ", windows=" << jc.windows_checked
                << "): " << (jc.connected ? "PASS" : "FAIL") << "\n";
      if (!jc.connected) {
        const double s = *jc.violating_window_start;
        std::cout << "violating window: [" << io::format_double(s) << ", "
                  << io::format_double(s + *a.tau) << "]\n";
        pass = false;
      }
    }
  }
  return pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus protocols on switched networks"};
  app.set_version_flag("--version", std::string("conslab ") + kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "integrate a protocol on a switched network");
  cmd_sim->add_option("--network", sim.network, "network JSON")->required()->check(CLI::ExistingFile);
  cmd_sim->add_option("--protocol", sim.protocol, "protocol JSON")->required()->check(CLI::ExistingFile);
  auto* x0_file = cmd_sim->add_option("--x0-file", sim.x0_file, "initial state, one value per line")
                      ->check(CLI::ExistingFile);
  auto* x0_lcg = cmd_sim->add_flag("--x0-lcg", sim.x0_lcg, "initial state from the LCG");
  x0_file->excludes(x0_lcg);
  sim.lcg.add_to(cmd_sim);
  cmd_sim->add_option("--dt", sim.dt, "Euler step [s]")->capture_default_str();
  cmd_sim->add_option("--t-end", sim.t_end, "final time [s]")->capture_default_str();
  cmd_sim->add_option("--epsilon", sim.epsilon, "settling threshold on V; enables early stop");
  cmd_sim->add_option("--record-stride", sim.record_stride, "record every k-th step")
      ->capture_default_str();
  cmd_sim->add_flag("--per-node", sim.per_node, "add per-node E_i columns to metrics.csv");
  cmd_sim->add_option("--out", sim.out, "output directory")->required();

  BenchmarkArgs bench;
  auto* cmd_bench = app.add_subcommand("benchmark", "calibrated finite/fixed-time sweep");
  cmd_bench->add_option("--experiment", bench.experiment, "1 = finite time, 2 = fixed time")
      ->required();
  cmd_bench->add_option("--sizes", bench.sizes, "comma-separated network sizes (must include 25)")
      ->delimiter(',');
  bench.lcg.add_to(cmd_bench);
  cmd_bench->add_option("--dt", bench.dt, "Euler step [s]")->capture_default_str();
  cmd_bench->add_option("--t-end", bench.t_end, "per-row time limit [s]")->capture_default_str();
  cmd_bench->add_option("--chords", bench.chords, "offsets of the second graph: \"1,h\" or \"h\"")
      ->check(CLI::IsMember({"1,h", "h"}))
      ->capture_default_str();
  cmd_bench->add_option("--out", bench.out, "output directory")->required();

  VerifyArgs ver;
  auto* cmd_ver = app.add_subcommand("verify", "connectivity and spectral checks");
  auto* net_opt = cmd_ver->add_option("--network", ver.network, "network JSON")->check(CLI::ExistingFile);
  auto* graph_opt = cmd_ver->add_option("--graph", ver.graph, "graph JSON")->check(CLI::ExistingFile);
  cmd_ver->add_option("--tau", ver.tau, "joint-connectivity window length")->needs(net_opt);
  cmd_ver->add_option("--horizon", ver.horizon, "span of window starts (default 3 tau)");
  cmd_ver->add_flag("--spectral", ver.spectral, "report lambda2 and kappa1");
  net_opt->excludes(graph_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (cmd_sim->parsed()) {
      if (sim.x0_file.empty() && !sim.x0_lcg) {
        throw io::InputError("one of --x0-file or --x0-lcg is required");
      }
      return run_simulate(sim);
    }
    if (cmd_bench->parsed()) return run_benchmark(bench);
    if (ver.network.empty() && ver.graph.empty()) {
      throw io::InputError("verify needs --network or --graph");
    }
    return run_verify(ver);
  } catch (const io::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << "\n";
    return kNoSettle;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
