#include "conslab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace conslab {

double lyapunov_v(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("V of an empty state");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

void IsceAccumulator::accumulate(std::span<const double> u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (u.size() != squared_.size()) throw std::invalid_argument("control size mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) squared_[i] += u[i] * u[i] * dt;
}

std::vector<double> IsceAccumulator::per_node() const {
  std::vector<double> e(squared_.size());
  std::transform(squared_.begin(), squared_.end(), e.begin(), [](double s) { return std::sqrt(s); });
  return e;
}

double IsceAccumulator::total() const {
  double sum = 0.0;
  for (double s : squared_) sum += std::sqrt(s);
  return sum;
}

std::optional<double> settling_time(const MetricSeries& series, double epsilon) {
  if (series.v.empty() || series.v.back() > epsilon) return std::nullopt;
  std::size_t k = series.v.size();
  while (k > 0 && series.v[k - 1] <= epsilon) --k;
  return series.times[k];
}

double consensus_value(const MetricSeries& series, std::span<const double> x_final,
                       double epsilon) {
  if (x_final.empty()) throw std::invalid_argument("consensus value of an empty state");
  if (series.v.empty() || series.v.back() > epsilon) {
    throw std::domain_error("trajectory has not settled below epsilon");
  }
  return std::accumulate(x_final.begin(), x_final.end(), 0.0) /
         static_cast<double>(x_final.size());
}

}  // namespace conslab
