#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "conslab/graph.hpp"

namespace conslab {

// sigma(t) = (floor(rate * t) mod modulus) + offset.
struct FloorModulo {
  double rate = 1.0;
  std::size_t modulus = 1;
  std::size_t offset = 0;
};

// sigma(t) = indices[k] on [times[k-1], times[k]), with times[-1] = t0 and
// times[size] = +inf. Consecutive indices must differ.
struct Breakpoints {
  std::vector<double> times;
  std::vector<std::size_t> indices;
};

// Piecewise-constant, right-continuous switching signal defined on [t0, inf).
class SwitchingSignal {
 public:
  using Variant = std::variant<FloorModulo, Breakpoints>;

  // Both factories throw std::invalid_argument when the signal would have a
  // zero dwell time or malformed parameters.
  static SwitchingSignal floor_modulo(double rate, std::size_t modulus, std::size_t offset = 0,
                                      double t0 = 0.0);
  static SwitchingSignal breakpoints(std::vector<double> times, std::vector<std::size_t> indices,
                                     double t0 = 0.0);
  static SwitchingSignal constant(std::size_t index, double t0 = 0.0) {
    return floor_modulo(1.0, 1, index, t0);
  }

  const Variant& kind() const { return kind_; }
  double t0() const { return t0_; }

  // Minimum spacing between consecutive switch instants (+inf if the signal
  // never switches).
  double min_dwell() const;

  // Largest graph index the signal can produce.
  std::size_t max_index() const;

  // Throws std::domain_error for t < t0.
  std::size_t active_index(double t) const;

  // Sorted switch instants in (t_a, t_b]. Throws std::invalid_argument for
  // t_a > t_b.
  std::vector<double> switch_times(double t_a, double t_b) const;

 private:
  SwitchingSignal(Variant kind, double t0) : kind_(std::move(kind)), t0_(t0) {}

  Variant kind_;
  double t0_;
};

// Family of graphs on a shared vertex set plus the signal selecting among
// them.
class DynamicNetwork {
 public:
  // Throws std::invalid_argument for an empty family, mismatched vertex
  // counts, or a signal that can select an index outside the family.
  DynamicNetwork(std::vector<WeightedDigraph> family, SwitchingSignal signal);

  std::size_t vertex_count() const { return family_.front().vertex_count(); }
  const std::vector<WeightedDigraph>& family() const { return family_; }
  const SwitchingSignal& signal() const { return signal_; }

  const WeightedDigraph& active_graph(double t) const {
    return family_[signal_.active_index(t)];
  }

 private:
  std::vector<WeightedDigraph> family_;
  SwitchingSignal signal_;
};

struct JointConnectivity {
  bool connected = true;
  // Earliest window start whose union is disconnected.
  std::optional<double> violating_window_start;
  std::size_t windows_checked = 0;
};

// Checks every window [s, s + tau] with s in {t0} and the switch instants in
// [t0, t0 + horizon - tau]. A graph counts for a window when it is active on
// a subinterval of positive length. Requires tau > 0 and horizon >= tau
// (std::invalid_argument).
JointConnectivity is_tau_jointly_connected(const DynamicNetwork& net, double tau, double horizon);

// Indices of the graphs active on a positive-length part of [start, start + tau].
std::vector<std::size_t> graphs_active_in_window(const SwitchingSignal& sig, double start,
                                                 double tau);

}  // namespace conslab
