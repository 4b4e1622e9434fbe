#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "conslab/metrics.hpp"
#include "conslab/protocol.hpp"
#include "conslab/switching.hpp"

namespace conslab {

inline constexpr double kDivergenceBound = 1e12;
inline constexpr std::size_t kStickyWindowSteps = 100;

struct SimConfig {
  double dt = 1e-4;
  double t_end = 10.0;
  // When set, settling is tracked at step resolution and the run stops once
  // V has stayed <= stop_epsilon for kStickyWindowSteps consecutive steps.
  std::optional<double> stop_epsilon;
  std::size_t record_stride = 1;
  bool record_node_effort = false;
};

struct SwitchEvent {
  double time;
  std::size_t from;
  std::size_t to;
};

// Sampled solution of the closed loop. Row k of states/controls/active holds
// x(t_k), the control applied on [t_k, t_k + dt) and the graph index in use.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> controls;
  std::vector<std::size_t> active;
  MetricSeries metrics;
  std::vector<SwitchEvent> switches;

  std::size_t steps = 0;
  bool stopped_early = false;
  // Start of the final run of steps with V <= stop_epsilon, and E_tot there.
  std::optional<double> settling_time;
  std::optional<double> effort_at_settling;

  const std::vector<double>& final_state() const { return states.back(); }
  double final_v() const { return metrics.v.back(); }
  double final_effort() const { return metrics.e_tot.back(); }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Throws std::invalid_argument for an invalid config or one where a switch
// instant of the signal in (t0, t_end] is not on a step boundary.
void validate_config(const SimConfig& cfg, const SwitchingSignal& sig);

// Explicit Euler: x(t + dt) = x(t) + dt * u(x(t), graph active on the step).
// Throws std::invalid_argument on dimension mismatch or misaligned switches and
// DivergenceError when a state leaves [-kDivergenceBound, kDivergenceBound]
// or becomes non-finite.
Trajectory simulate(const DynamicNetwork& net, const Protocol& p, std::span<const double> x0,
                    const SimConfig& cfg);

struct ReplayResult {
  bool ok = true;
  std::optional<std::size_t> first_mismatch;  // index of the bad successor row
};

// Recomputes every recorded transition under `p` and `net`; requires a
// trajectory recorded with stride 1. Tolerance is 1e-12 scaled by max(1, |x|).
ReplayResult replay_check(const Trajectory& traj, const DynamicNetwork& net, const Protocol& p,
                          const SimConfig& cfg);

}  // namespace conslab
