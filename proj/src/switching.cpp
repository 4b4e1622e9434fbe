#include "conslab/switching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace conslab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// floor(rate * t) adjusted so that t = j / rate (the representation used for
// switch instants) always maps to j, keeping the signal right-continuous.
long long floor_count(double rate, double t) {
  auto j = static_cast<long long>(std::floor(rate * t));
  if (static_cast<double>(j + 1) / rate <= t) ++j;
  if (static_cast<double>(j) / rate > t) --j;
  return j;
}

std::size_t positive_mod(long long a, std::size_t m) {
  const auto mm = static_cast<long long>(m);
  return static_cast<std::size_t>(((a % mm) + mm) % mm);
}

}  // namespace

SwitchingSignal SwitchingSignal::floor_modulo(double rate, std::size_t modulus,
                                              std::size_t offset, double t0) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("switching rate must be positive and finite");
  }
  if (modulus == 0) throw std::invalid_argument("switching modulus must be positive");
  if (!std::isfinite(t0)) throw std::invalid_argument("t0 must be finite");
  return SwitchingSignal(FloorModulo{rate, modulus, offset}, t0);
}

SwitchingSignal SwitchingSignal::breakpoints(std::vector<double> times,
                                             std::vector<std::size_t> indices, double t0) {
  if (indices.size() != times.size() + 1) {
    throw std::invalid_argument("breakpoint signal needs exactly one more index than times");
  }
  double prev = t0;
  for (double t : times) {
    if (!std::isfinite(t) || !(t > prev)) {
      throw std::invalid_argument("breakpoint times must be finite and strictly increasing after t0");
    }
    prev = t;
  }
  for (std::size_t k = 1; k < indices.size(); ++k) {
    if (indices[k] == indices[k - 1]) {
      throw std::invalid_argument("consecutive breakpoint indices must differ");
    }
  }
  return SwitchingSignal(Breakpoints{std::move(times), std::move(indices)}, t0);
}

double SwitchingSignal::min_dwell() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{
                        [](const FloorModulo& f) { return f.modulus == 1 ? inf : 1.0 / f.rate; },
                        [this](const Breakpoints& b) {
                          double gap = inf;
                          double prev = t0_;
                          for (double t : b.times) {
                            gap = std::min(gap, t - prev);
                            prev = t;
                          }
                          return gap;
                        },
                    },
                    kind_);
}

std::size_t SwitchingSignal::max_index() const {
  return std::visit(Overloaded{
                        [](const FloorModulo& f) { return f.offset + f.modulus - 1; },
                        [](const Breakpoints& b) {
                          return *std::max_element(b.indices.begin(), b.indices.end());
                        },
                    },
                    kind_);
}

std::size_t SwitchingSignal::active_index(double t) const {
  if (t < t0_) {
    throw std::domain_error("switching signal queried at t=" + std::to_string(t) +
                            " before t0=" + std::to_string(t0_));
  }
  return std::visit(Overloaded{
                        [t](const FloorModulo& f) {
                          return positive_mod(floor_count(f.rate, t), f.modulus) + f.offset;
                        },
                        [t](const Breakpoints& b) {
                          const auto k = std::upper_bound(b.times.begin(), b.times.end(), t) -
                                         b.times.begin();
                          return b.indices[static_cast<std::size_t>(k)];
                        },
                    },
                    kind_);
}

std::vector<double> SwitchingSignal::switch_times(double t_a, double t_b) const {
  if (t_a > t_b) throw std::invalid_argument("switch_times: inverted interval");
  std::vector<double> out;
  std::visit(Overloaded{
                 [&](const FloorModulo& f) {
                   if (f.modulus == 1) return;
                   const long long lo = floor_count(f.rate, std::max(t_a, t0_));
                   const long long hi = floor_count(f.rate, t_b);
                   for (long long j = lo; j <= hi; ++j) {
                     const double s = static_cast<double>(j) / f.rate;
                     if (s > t_a && s <= t_b && s > t0_) out.push_back(s);
                   }
                 },
                 [&](const Breakpoints& b) {
                   for (double s : b.times)
                     if (s > t_a && s <= t_b) out.push_back(s);
                 },
             },
             kind_);
  return out;
}

DynamicNetwork::DynamicNetwork(std::vector<WeightedDigraph> family, SwitchingSignal signal)
    : family_(std::move(family)), signal_(std::move(signal)) {
  if (family_.empty()) throw std::invalid_argument("dynamic network needs at least one graph");
  const std::size_t n = family_.front().vertex_count();
  for (const WeightedDigraph& g : family_) {
    if (g.vertex_count() != n) {
      throw std::invalid_argument("all graphs of a dynamic network must share the vertex set");
    }
  }
  if (signal_.max_index() >= family_.size()) {
    throw std::invalid_argument("switching signal can select graph " +
                                std::to_string(signal_.max_index()) + " but the family has " +
                                std::to_string(family_.size()));
  }
}

std::vector<std::size_t> graphs_active_in_window(const SwitchingSignal& sig, double start,
                                                 double tau) {
  std::set<std::size_t> active{sig.active_index(start)};
  const double end = start + tau;
  for (double s : sig.switch_times(start, end))
    if (s < end) active.insert(sig.active_index(s));
  return {active.begin(), active.end()};
}

JointConnectivity is_tau_jointly_connected(const DynamicNetwork& net, double tau, double horizon) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(horizon >= tau)) throw std::invalid_argument("horizon must be at least tau");
  const SwitchingSignal& sig = net.signal();
  const double t0 = sig.t0();

  std::vector<double> starts{t0};
  for (double s : sig.switch_times(t0, t0 + horizon - tau)) starts.push_back(s);

  JointConnectivity result;
  std::set<std::vector<std::size_t>> known_good;
  for (double start : starts) {
    ++result.windows_checked;
    const std::vector<std::size_t> active = graphs_active_in_window(sig, start, tau);
    if (known_good.contains(active)) continue;
    std::vector<WeightedDigraph> members;
    members.reserve(active.size());
    for (std::size_t idx : active) members.push_back(net.family()[idx]);
    if (!is_connected(union_graph(members))) {
      result.connected = false;
      result.violating_window_start = start;
      return result;
    }
    known_good.insert(active);
  }
  return result;
}

}  // namespace conslab
