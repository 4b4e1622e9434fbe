#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conslab/protocol.hpp"
#include "conslab/simulator.hpp"
#include "conslab/switching.hpp"

namespace conslab {

// z_{i+1} = (r z_i + s) mod M, x_i = l z_i / M - m for i = 1..n.
struct LcgConfig {
  std::int64_t r = 45;
  std::int64_t s = 1;
  std::int64_t modulus = 1024;
  double l = 20.0;
  double m = 10.0;
  std::int64_t z0 = 1024;
};

// z0 only seeds the recurrence; the states come from z_1 .. z_n.
// Throws std::invalid_argument for modulus <= 0 or n == 0.
std::vector<double> lcg_initial_conditions(const LcgConfig& cfg, std::size_t n);

// Largest h in [1, n/2] with gcd(h, n) == 1.
std::size_t benchmark_chord_offset(std::size_t n);

inline constexpr double kBenchmarkSwitchRate = 5.0;

// Edge set of the second benchmark graph. The ring C_n is always the first.
enum class ChordMember {
  kOffsetsOneAndH,  // ring plus chords: offsets {1, h}
  kOffsetH,         // chords only: offset {h}
};

// Two unit-weight circulants, C_n and the chord member, alternating under
// sigma(t) = floor(5 t) mod 2. Requires n >= 5.
DynamicNetwork benchmark_topology(std::size_t n,
                                  ChordMember chords = ChordMember::kOffsetsOneAndH);
std::string to_string(ChordMember c);

enum class Experiment {
  kFiniteTime = 1,  // k |x|^(1/2) sign(x)
  kFixedTime = 2,   // k |x|^(1/2) sign(x) + k |x|^(3/2) sign(x)
};

Protocol experiment_protocol(Experiment e, Direction d, double gain);
std::string experiment_protocol_name(Experiment e);

class CalibrationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CalibrationOptions {
  double k_min = 1e-3;
  double k_max = 1e3;
  int iterations = 48;
  double tolerance_steps = 10.0;  // accepted |T - target| in units of dt
};

struct Calibration {
  Experiment experiment;
  Direction direction;
  std::size_t n;
  double gain;
  double settling_time;
  double effort;
  double target_v;
  double target_t;
};

// Geometric bisection on the gain so that the sticky settling time at
// epsilon = target_v, from LCG initial conditions on benchmark_topology(n),
// lands on target_t. Larger gains settle sooner; a diverging probe counts as
// too fast. Throws CalibrationError when the probes never straddle the target
// or the final time misses it by more than tolerance_steps * dt.
Calibration calibrate_gain(Experiment e, Direction d, std::size_t n, double target_v,
                           double target_t, double dt, const LcgConfig& lcg,
                           ChordMember chords = ChordMember::kOffsetsOneAndH,
                           const CalibrationOptions& opts = {});

struct BenchmarkRow {
  std::size_t n;
  double lambda2;
  std::string protocol;
  Direction direction;
  double k;
  std::optional<double> k1;
  std::optional<double> k2;
  std::optional<double> settling_time;
  double effort;  // E_tot at settling, or at the end of an unsettled run
  double dt;
  double epsilon;
};

struct ExperimentResult {
  std::vector<Calibration> calibrations;  // per-edge first, then aggregated
  std::vector<BenchmarkRow> rows;         // sorted by n, per-edge before aggregated
};

inline constexpr std::size_t kCalibrationSize = 25;
inline constexpr double kBenchmarkEpsilon = 0.05;
inline constexpr double kCalibrationTime = 1.0;

// Calibrates both directions at n = 25, then simulates every size up to
// cfg.t_end. Rows run on up to `threads` workers and are bit-identical to a
// serial run. Throws std::invalid_argument when 25 is not among the sizes and
// rethrows the first row failure (e.g. DivergenceError) by row order.
ExperimentResult run_experiment(Experiment e, std::vector<std::size_t> sizes, const SimConfig& cfg,
                                const LcgConfig& lcg,
                                ChordMember chords = ChordMember::kOffsetsOneAndH,
                                std::size_t threads = 1);

}  // namespace conslab
