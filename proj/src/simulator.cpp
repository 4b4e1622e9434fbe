#include "conslab/simulator.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace conslab {

namespace {

std::size_t step_count(const SimConfig& cfg, double t0) {
  return static_cast<std::size_t>(std::ceil((cfg.t_end - t0) / cfg.dt - 1e-9));
}

// Graph index in force on step k, i.e. on [t0 + k dt, t0 + (k + 1) dt).
std::size_t index_on_step(const SwitchingSignal& sig, double dt, std::size_t k) {
  return sig.active_index(sig.t0() + (static_cast<double>(k) + 0.5) * dt);
}

}  // namespace

void validate_config(const SimConfig& cfg, const SwitchingSignal& sig) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.t_end > sig.t0())) throw std::invalid_argument("t_end must exceed t0");
  if (cfg.record_stride == 0) throw std::invalid_argument("record_stride must be at least 1");
  if (cfg.stop_epsilon && !(*cfg.stop_epsilon > 0.0)) {
    throw std::invalid_argument("stop epsilon must be positive");
  }
  for (double s : sig.switch_times(sig.t0(), cfg.t_end)) {
    const double steps = (s - sig.t0()) / cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "switch instant " << s << " does not fall on a step boundary of dt=" << cfg.dt;
      throw std::invalid_argument(msg.str());
    }
  }
}

Trajectory simulate(const DynamicNetwork& net, const Protocol& p, std::span<const double> x0,
                    const SimConfig& cfg) {
  const SwitchingSignal& sig = net.signal();
  validate_config(cfg, sig);
  const std::size_t n = net.vertex_count();
  if (x0.size() != n) {
    throw std::invalid_argument("initial state has " + std::to_string(x0.size()) +
                                " entries, network has " + std::to_string(n) + " vertices");
  }

  const double t0 = sig.t0();
  const double dt = cfg.dt;
  const std::size_t total_steps = step_count(cfg, t0);

  Trajectory traj;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> u(n, 0.0);
  IsceAccumulator effort(n);

  std::size_t below_run_start = 0;
  bool below = false;
  std::size_t previous_index = index_on_step(sig, dt, 0);

  auto record = [&](double t, double v, std::size_t idx) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.controls.push_back(u);
    traj.active.push_back(idx);
    traj.metrics.times.push_back(t);
    traj.metrics.v.push_back(v);
    traj.metrics.e_tot.push_back(effort.total());
    if (cfg.record_node_effort) traj.metrics.e_node.push_back(effort.per_node());
  };

  for (std::size_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const std::size_t idx = index_on_step(sig, dt, k);
    if (idx != previous_index) {
      traj.switches.push_back(SwitchEvent{t, previous_index, idx});
      previous_index = idx;
    }
    control_into(p, net.family()[idx], x, u);
    const double v = lyapunov_v(x);

    bool stop = false;
    if (cfg.stop_epsilon) {
      if (v <= *cfg.stop_epsilon) {
        if (!below) {
          below = true;
          below_run_start = k;
          traj.settling_time = t;
          traj.effort_at_settling = effort.total();
        }
        stop = k - below_run_start >= kStickyWindowSteps;
      } else {
        below = false;
        traj.settling_time.reset();
        traj.effort_at_settling.reset();
      }
    }
    const bool last = k == total_steps || stop;
    if (k % cfg.record_stride == 0 || last) record(t, v, idx);
    if (last) {
      traj.steps = k;
      traj.stopped_early = stop && k < total_steps;
      break;
    }

    effort.accumulate(u, dt);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += dt * u[i];
      if (!(std::abs(x[i]) <= kDivergenceBound)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "state of node " << i << " diverged (" << x[i] << ") at t=" << t + dt;
        throw DivergenceError(msg.str(), t + dt);
      }
    }
  }
  return traj;
}

ReplayResult replay_check(const Trajectory& traj, const DynamicNetwork& net, const Protocol& p,
                          const SimConfig& cfg) {
  ReplayResult result;
  const SwitchingSignal& sig = net.signal();
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const auto& x = traj.states[k];
    const auto& next = traj.states[k + 1];
    const std::size_t idx = index_on_step(sig, cfg.dt, k);
    const double h = traj.times[k + 1] - traj.times[k];
    const bool stride_one = std::abs(h - cfg.dt) <= 1e-9 * cfg.dt;
    bool match = stride_one && x.size() == net.vertex_count();
    if (match) {
      const std::vector<double> u = control(p, net.family()[idx], x);
      for (std::size_t i = 0; i < x.size() && match; ++i) {
        const double expected = x[i] + cfg.dt * u[i];
        match = std::abs(next[i] - expected) <= 1e-12 * std::max(1.0, std::abs(expected));
      }
    }
    if (!match) {
      result.ok = false;
      result.first_mismatch = k + 1;
      return result;
    }
  }
  return result;
}

}  // namespace conslab
