#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace conslab {

// V(x) = max(x) - min(x). Throws std::invalid_argument for an empty vector.
double lyapunov_v(std::span<const double> x);

// Running Integrated Squared Control Effort: S_i += u_i^2 dt (left endpoint),
// E_i = sqrt(S_i), E_tot = sum_i E_i.
class IsceAccumulator {
 public:
  explicit IsceAccumulator(std::size_t n) : squared_(n, 0.0) {}

  // Throws std::invalid_argument for dt <= 0 or a size mismatch.
  void accumulate(std::span<const double> u, double dt);

  std::vector<double> per_node() const;
  double total() const;
  std::size_t size() const { return squared_.size(); }

 private:
  std::vector<double> squared_;
};

// Sampled metric history of one trajectory.
struct MetricSeries {
  std::vector<double> times;
  std::vector<double> v;
  std::vector<double> e_tot;
  std::vector<std::vector<double>> e_node;  // optional, one row per sample
};

// Earliest recorded time after which V stays <= epsilon through the end of
// the series; nullopt when the last sample is above epsilon.
std::optional<double> settling_time(const MetricSeries& series, double epsilon);

// Mean of the final state. Throws std::domain_error when the final V of the
// series exceeds epsilon.
double consensus_value(const MetricSeries& series, std::span<const double> x_final,
                       double epsilon);

}  // namespace conslab
