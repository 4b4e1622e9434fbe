#include "conslab/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "conslab/graph.hpp"

namespace conslab {

std::vector<double> lcg_initial_conditions(const LcgConfig& cfg, std::size_t n) {
  if (cfg.modulus <= 0) throw std::invalid_argument("LCG modulus must be positive");
  if (n == 0) throw std::invalid_argument("need at least one initial condition");
  std::vector<double> x;
  x.reserve(n);
  std::int64_t z = cfg.z0;
  for (std::size_t i = 0; i < n; ++i) {
    z = ((cfg.r * z + cfg.s) % cfg.modulus + cfg.modulus) % cfg.modulus;
    x.push_back(cfg.l * static_cast<double>(z) / static_cast<double>(cfg.modulus) - cfg.m);
  }
  return x;
}

std::size_t benchmark_chord_offset(std::size_t n) {
  for (std::size_t h = n / 2; h >= 1; --h)
    if (std::gcd(h, n) == 1) return h;
  return 1;
}

DynamicNetwork benchmark_topology(std::size_t n, ChordMember chords) {
  if (n < 5) throw std::invalid_argument("benchmark topology needs n >= 5");
  const std::size_t h = benchmark_chord_offset(n);
  std::vector<std::size_t> offsets{h};
  if (chords == ChordMember::kOffsetsOneAndH) offsets.insert(offsets.begin(), 1);
  std::vector<WeightedDigraph> family{circulant_graph(n, {1}), circulant_graph(n, offsets)};
  return DynamicNetwork(std::move(family),
                        SwitchingSignal::floor_modulo(kBenchmarkSwitchRate, 2, 0, 0.0));
}

std::string to_string(ChordMember c) {
  return c == ChordMember::kOffsetsOneAndH ? "1,h" : "h";
}

Protocol experiment_protocol(Experiment e, Direction d, double gain) {
  if (e == Experiment::kFiniteTime) return Protocol{d, NodeFunction::power(gain, 0.5)};
  return Protocol{d, NodeFunction::fixed_time(gain, gain, 0.5, 1.5)};
}

std::string experiment_protocol_name(Experiment e) {
  return e == Experiment::kFiniteTime ? "power" : "fixed_time";
}

namespace {

struct Probe {
  bool fast;  // settled by the target (or blew up)
  std::optional<double> settling_time;
  double effort;
};

Probe probe(const DynamicNetwork& net, Experiment e, Direction d, double gain,
            const std::vector<double>& x0, const SimConfig& cfg, double target_t) {
  try {
    const Trajectory traj = simulate(net, experiment_protocol(e, d, gain), x0, cfg);
    const bool fast = traj.settling_time && *traj.settling_time <= target_t + 0.5 * cfg.dt;
    return Probe{fast, traj.settling_time, traj.effort_at_settling.value_or(traj.final_effort())};
  } catch (const DivergenceError&) {
    return Probe{true, std::nullopt, std::nan("")};
  }
}

}  // namespace

Calibration calibrate_gain(Experiment e, Direction d, std::size_t n, double target_v,
                           double target_t, double dt, const LcgConfig& lcg,
                           ChordMember chords, const CalibrationOptions& opts) {
  if (!(target_v > 0.0) || !(target_t > 0.0)) {
    throw std::invalid_argument("calibration targets must be positive");
  }
  const DynamicNetwork net = benchmark_topology(n, chords);
  const std::vector<double> x0 = lcg_initial_conditions(lcg, n);

  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 2.0 * target_t;
  cfg.stop_epsilon = target_v;
  cfg.record_stride = std::numeric_limits<std::size_t>::max();

  double lo = opts.k_min;
  double hi = opts.k_max;
  bool saw_fast = false;
  bool saw_slow = false;
  for (int it = 0; it < opts.iterations; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (probe(net, e, d, mid, x0, cfg, target_t).fast) {
      hi = mid;
      saw_fast = true;
    } else {
      lo = mid;
      saw_slow = true;
    }
  }

  const std::string label = experiment_protocol_name(e) + "/" + to_string(d);
  if (!saw_fast || !saw_slow) {
    const Probe at_min = probe(net, e, d, opts.k_min, x0, cfg, target_t);
    const Probe at_max = probe(net, e, d, opts.k_max, x0, cfg, target_t);
    std::ostringstream msg;
    msg << "calibration of " << label << " is not bracketed on [" << opts.k_min << ", "
        << opts.k_max << "]: T(k_min)="
        << (at_min.settling_time ? std::to_string(*at_min.settling_time) : "none")
        << ", T(k_max)="
        << (at_max.settling_time ? std::to_string(*at_max.settling_time) : "none");
    throw CalibrationError(msg.str());
  }

  const Probe final_probe = probe(net, e, d, hi, x0, cfg, target_t);
  if (!final_probe.settling_time ||
      std::abs(*final_probe.settling_time - target_t) > opts.tolerance_steps * dt) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "calibration of " << label << " ended at k=" << hi << " with settling time "
        << (final_probe.settling_time ? std::to_string(*final_probe.settling_time) : "none")
        << ", outside the target band";
    throw CalibrationError(msg.str());
  }
  return Calibration{e, d, n, hi, *final_probe.settling_time, final_probe.effort, target_v,
                     target_t};
}

ExperimentResult run_experiment(Experiment e, std::vector<std::size_t> sizes, const SimConfig& cfg,
                                const LcgConfig& lcg, ChordMember chords,
                                std::size_t threads) {
  if (std::find(sizes.begin(), sizes.end(), kCalibrationSize) == sizes.end()) {
    throw std::invalid_argument("sizes must include n=25, the calibration anchor");
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  ExperimentResult result;
  for (Direction d : {Direction::kPerEdge, Direction::kAggregated}) {
    result.calibrations.push_back(calibrate_gain(e, d, kCalibrationSize, kBenchmarkEpsilon,
                                                 kCalibrationTime, cfg.dt, lcg, chords));
  }

  struct Job {
    std::size_t n;
    const Calibration* cal;
  };
  std::vector<Job> jobs;
  for (std::size_t n : sizes)
    for (const Calibration& c : result.calibrations) jobs.push_back(Job{n, &c});

  SimConfig row_cfg = cfg;
  row_cfg.stop_epsilon = kBenchmarkEpsilon;
  row_cfg.record_stride = std::numeric_limits<std::size_t>::max();

  std::vector<std::optional<BenchmarkRow>> rows(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        const Job& job = jobs[j];
        const DynamicNetwork net = benchmark_topology(job.n, chords);
        const Protocol p = experiment_protocol(e, job.cal->direction, job.cal->gain);
        const Trajectory traj = simulate(net, p, lcg_initial_conditions(lcg, job.n), row_cfg);
        BenchmarkRow row{job.n,
                         algebraic_connectivity(net.family()[0]),
                         experiment_protocol_name(e),
                         job.cal->direction,
                         job.cal->gain,
                         std::nullopt,
                         std::nullopt,
                         traj.settling_time,
                         traj.effort_at_settling.value_or(traj.final_effort()),
                         cfg.dt,
                         kBenchmarkEpsilon};
        if (e == Experiment::kFixedTime) row.k1 = row.k2 = job.cal->gain;
        rows[j] = std::move(row);
      } catch (const DivergenceError& err) {
        failures[j] = std::make_exception_ptr(
            DivergenceError("row n=" + std::to_string(jobs[j].n) + " " +
                                to_string(jobs[j].cal->direction) + ": " + err.what(),
                            err.time()));
      } catch (...) {
        failures[j] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (const std::exception_ptr& f : failures)
    if (f) std::rethrow_exception(f);
  for (auto& r : rows) result.rows.push_back(std::move(*r));
  return result;
}

}  // namespace conslab
