#include <doctest.h>

#include <cmath>
#include <numeric>
#include <algorithm>
#include <random>
#include <stdexcept>

#include "conslab/simulator.hpp"

using namespace conslab;

namespace {

DynamicNetwork static_net(WeightedDigraph g) {
  return DynamicNetwork({std::move(g)}, SwitchingSignal::constant(0));
}

DynamicNetwork pair_net() { return static_net(circulant_graph(2, {1})); }

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("linear protocol on two nodes follows the Euler recursion") {
  // The gap contracts by exactly (1 - 2 k dt) per step.
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  const double k = 1.5;
  const auto traj = simulate(pair_net(), {Direction::kPerEdge, NodeFunction::linear(k)},
                             std::vector<double>{3.0, -1.0}, cfg);
  REQUIRE(traj.times.size() == 2001);
  CHECK(traj.steps == 2000);
  CHECK(traj.times.back() == doctest::Approx(2.0));
  for (std::size_t s = 0; s < traj.times.size(); s += 97) {
    const double expected = 4.0 * std::pow(1.0 - 2.0 * k * cfg.dt, static_cast<double>(s));
    CHECK(traj.metrics.v[s] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(mean(traj.states[s]) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_FALSE(traj.settling_time.has_value());
}

TEST_CASE("two-node sign protocol settles at V0 / (2k)") {
  for (double dt : {1e-3, 1e-4}) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 2.0;
    cfg.stop_epsilon = 2.0 * dt;
    const auto traj = simulate(pair_net(), {Direction::kAggregated, NodeFunction::sign(1.0)},
                               std::vector<double>{1.0, -1.0}, cfg);
    REQUIRE(traj.settling_time.has_value());
    CHECK(std::abs(*traj.settling_time - 1.0) <= 2.0 * dt);
    CHECK(traj.stopped_early);
    CHECK(traj.steps == static_cast<std::size_t>(std::llround(*traj.settling_time / dt)) +
                            kStickyWindowSteps);
    REQUIRE(traj.effort_at_settling.has_value());
    // |u_i| = 1 on [0, T): E_tot = 2 sqrt(T).
    CHECK(*traj.effort_at_settling == doctest::Approx(2.0 * std::sqrt(*traj.settling_time)).epsilon(1e-9));
  }
}

TEST_CASE("settling tracking resets when V leaves the band") {
  // With 2 k dt = 2.5 the gap is multiplied by -1.5 each step: V starts
  // inside the band and then grows out of it.
  SimConfig cfg;
  cfg.dt = 0.5;
  cfg.t_end = 5.0;
  cfg.stop_epsilon = 1.2;
  const auto traj = simulate(pair_net(), {Direction::kPerEdge, NodeFunction::linear(2.5)},
                             std::vector<double>{0.5, -0.5}, cfg);
  CHECK(traj.metrics.v.front() <= 1.2);
  CHECK_FALSE(traj.settling_time.has_value());
  CHECK_FALSE(traj.effort_at_settling.has_value());
  CHECK_FALSE(traj.stopped_early);
}

TEST_CASE("switch events follow the signal") {
  const DynamicNetwork net({circulant_graph(6, {1}), circulant_graph(6, {1, 2})},
                           SwitchingSignal::floor_modulo(5.0, 2));
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  const auto traj = simulate(net, {Direction::kPerEdge, NodeFunction::linear(1.0)},
                             std::vector<double>{0, 1, 2, 3, 4, 5}, cfg);
  REQUIRE(traj.switches.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(traj.switches[j].time == doctest::Approx(0.2 * static_cast<double>(j + 1)));
    CHECK(traj.switches[j].from == j % 2);
    CHECK(traj.switches[j].to == (j + 1) % 2);
  }
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    CHECK(traj.active[k] == net.signal().active_index(traj.times[k] + 0.5 * cfg.dt));
}

TEST_CASE("replay check accepts the trajectory and catches perturbations") {
  const DynamicNetwork net({circulant_graph(5, {1}), circulant_graph(5, {2})},
                           SwitchingSignal::floor_modulo(10.0, 2));
  const Protocol p{Direction::kAggregated, NodeFunction::fixed_time(1.0, 1.0, 0.5, 1.5)};
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  auto traj = simulate(net, p, std::vector<double>{1, -2, 3, 0.5, 4}, cfg);
  CHECK(replay_check(traj, net, p, cfg).ok);

  auto tampered = traj;
  tampered.states[400][2] += 1e-9;
  const auto r = replay_check(tampered, net, p, cfg);
  CHECK_FALSE(r.ok);
  CHECK(r.first_mismatch == 400);

  const Protocol other{Direction::kPerEdge, NodeFunction::fixed_time(1.0, 1.0, 0.5, 1.5)};
  CHECK_FALSE(replay_check(traj, net, other, cfg).ok);

  cfg.record_stride = 2;
  const auto strided = simulate(net, p, std::vector<double>{1, -2, 3, 0.5, 4}, cfg);
  CHECK_FALSE(replay_check(strided, net, p, cfg).ok);
}

TEST_CASE("record stride keeps the final sample") {
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.record_stride = 30;
  cfg.record_node_effort = true;
  const auto traj = simulate(pair_net(), {Direction::kPerEdge, NodeFunction::linear(1.0)},
                             std::vector<double>{1.0, 0.0}, cfg);
  REQUIRE(traj.times.size() == 5);
  CHECK(traj.times[3] == doctest::Approx(0.9));
  CHECK(traj.times.back() == doctest::Approx(1.0));
  CHECK(traj.metrics.e_node.size() == 5);
  CHECK(traj.metrics.e_node.back().size() == 2);
}

TEST_CASE("divergence is reported") {
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 1.0;
  try {
    simulate(pair_net(), {Direction::kPerEdge, NodeFunction::linear(1e6)},
             std::vector<double>{1.0, -1.0}, cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 0.01);
  }
}

TEST_CASE("configuration validation") {
  const DynamicNetwork net({circulant_graph(4, {1}), circulant_graph(4, {1, 2})},
                           SwitchingSignal::floor_modulo(3.0, 2));
  const Protocol p{Direction::kPerEdge, NodeFunction::linear(1.0)};
  const std::vector<double> x0{1, 2, 3, 4};
  SimConfig cfg;
  cfg.t_end = 1.0;
  // Switches at j/3 never land on a multiple of 1e-4.
  CHECK_THROWS_AS(simulate(net, p, x0, cfg), std::invalid_argument);
  cfg.t_end = 0.3;
  CHECK_NOTHROW(simulate(net, p, x0, cfg));
  cfg.dt = 1.0 / 300.0;
  cfg.t_end = 1.0;
  CHECK_NOTHROW(simulate(net, p, x0, cfg));

  SimConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(simulate(pair_net(), p, std::vector<double>{1, 2}, bad), std::invalid_argument);
  bad = SimConfig{};
  bad.t_end = 0.0;
  CHECK_THROWS_AS(simulate(pair_net(), p, std::vector<double>{1, 2}, bad), std::invalid_argument);
  bad = SimConfig{};
  bad.record_stride = 0;
  CHECK_THROWS_AS(simulate(pair_net(), p, std::vector<double>{1, 2}, bad), std::invalid_argument);
  bad = SimConfig{};
  bad.stop_epsilon = -1.0;
  CHECK_THROWS_AS(simulate(pair_net(), p, std::vector<double>{1, 2}, bad), std::invalid_argument);
  CHECK_THROWS_AS(simulate(pair_net(), p, std::vector<double>{1, 2, 3}, SimConfig{}),
                  std::invalid_argument);
}

TEST_CASE("nonzero start time") {
  const DynamicNetwork net({circulant_graph(4, {1}), circulant_graph(4, {2})},
                           SwitchingSignal::breakpoints({1.5}, {1, 0}, 1.0));
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  const auto traj = simulate(net, {Direction::kPerEdge, NodeFunction::linear(1.0)},
                             std::vector<double>{0, 1, 2, 3}, cfg);
  CHECK(traj.times.front() == 1.0);
  CHECK(traj.times.back() == doctest::Approx(2.0));
  REQUIRE(traj.switches.size() == 1);
  CHECK(traj.switches[0].time == doctest::Approx(1.5));
}

TEST_CASE("translation equivariance of the closed loop") {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  const DynamicNetwork net({circulant_graph(7, {1}), circulant_graph(7, {3})},
                           SwitchingSignal::floor_modulo(5.0, 2));
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  const std::vector<Protocol> protocols{
      {Direction::kPerEdge, NodeFunction::linear(1.0)},
      {Direction::kAggregated, NodeFunction::power(1.0, 0.5)},
      {Direction::kPerEdge, NodeFunction::fixed_time(1.0, 1.0, 0.5, 1.5)},
  };
  for (const auto& p : protocols) {
    std::vector<double> x0(7), shifted(7);
    const double c = d(rng);
    for (std::size_t i = 0; i < 7; ++i) {
      x0[i] = d(rng);
      shifted[i] = x0[i] + c;
    }
    const auto a = simulate(net, p, x0, cfg);
    const auto b = simulate(net, p, shifted, cfg);
    for (std::size_t i = 0; i < 7; ++i)
      CHECK(b.final_state()[i] - c == doctest::Approx(a.final_state()[i]).epsilon(1e-9).scale(1.0));
    CHECK(b.final_effort() == doctest::Approx(a.final_effort()).epsilon(1e-6));
  }
}

TEST_CASE("undirected per-edge protocols preserve the average") {
  const DynamicNetwork net({circulant_graph(9, {1}), circulant_graph(9, {1, 4})},
                           SwitchingSignal::floor_modulo(5.0, 2));
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 3.0;
  const std::vector<double> x0{4, -1, 2, 7, 0, 3, -5, 1, 8};
  const auto traj =
      simulate(net, {Direction::kPerEdge, NodeFunction::power(1.0, 0.5)}, x0, cfg);
  CHECK(mean(traj.final_state()) == doctest::Approx(mean(x0)).epsilon(1e-12));
  CHECK(traj.final_v() < 0.05);
}

TEST_CASE("relabeling vertices permutes the trajectory") {
  std::mt19937 rng(52);
  const std::size_t n = 8;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  auto relabel = [&](const WeightedDigraph& g) {
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) edges.push_back(Edge{perm[e.source], perm[e.target], e.weight});
    return WeightedDigraph(n, edges, g.undirected());
  };
  const WeightedDigraph a(n, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 1.0}, {3, 4, 0.5}, {4, 5, 1.0},
                              {5, 6, 1.0}, {6, 7, 3.0}, {7, 0, 1.0}}, false);
  const auto b = circulant_graph(n, {1, 3});
  const DynamicNetwork net({a, b}, SwitchingSignal::floor_modulo(5.0, 2));
  const DynamicNetwork pnet({relabel(a), relabel(b)}, SwitchingSignal::floor_modulo(5.0, 2));

  std::vector<double> x0{3, -1, 4, 1, -5, 9, 2, -6}, px0(n);
  for (std::size_t i = 0; i < n; ++i) px0[perm[i]] = x0[i];

  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  for (const auto& p : {Protocol{Direction::kPerEdge, NodeFunction::power(1.0, 0.5)},
                        Protocol{Direction::kAggregated, NodeFunction::fixed_time(1.0, 1.0, 0.5, 1.5)}}) {
    const auto ta = simulate(net, p, x0, cfg);
    const auto tb = simulate(pnet, p, px0, cfg);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(tb.final_state()[perm[i]] == doctest::Approx(ta.final_state()[i]).epsilon(1e-9).scale(1.0));
    CHECK(tb.final_effort() == doctest::Approx(ta.final_effort()).epsilon(1e-9));
  }
}

TEST_CASE("consensus states are equilibria") {
  const DynamicNetwork net({circulant_graph(5, {1}), circulant_graph(5, {2})},
                           SwitchingSignal::floor_modulo(5.0, 2));
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  const auto traj = simulate(net, {Direction::kPerEdge, NodeFunction::sign(2.0)},
                             std::vector<double>(5, 2.75), cfg);
  for (const auto& u : traj.controls)
    for (double ui : u) CHECK(ui == 0.0);
  for (double xi : traj.final_state()) CHECK(xi == 2.75);
  CHECK(traj.final_effort() == 0.0);
}

TEST_CASE("linear protocol on a balanced digraph converges to the average") {
  // Directed ring: every vertex has one in- and one out-edge.
  const WeightedDigraph ring(6, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {5, 0, 1.0}},
                             false);
  SimConfig cfg;
  cfg.dt = 1e-3;
  // Slowest mode decays like exp(-t / 2).
  cfg.t_end = 80.0;
  const std::vector<double> x0{5, -3, 2, 8, 0, -1};
  const auto traj = simulate(static_net(ring), {Direction::kPerEdge, NodeFunction::linear(1.0)}, x0, cfg);
  for (double xi : traj.final_state()) CHECK(xi == doctest::Approx(mean(x0)).epsilon(1e-9));
}

TEST_CASE("recorded samples start at x0 with increasing times") {
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.record_stride = 7;
  const std::vector<double> x0{1.0, 4.0};
  const auto traj = simulate(pair_net(), {Direction::kAggregated, NodeFunction::power(1.0, 0.5)}, x0, cfg);
  CHECK(traj.states.front() == x0);
  for (std::size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
  CHECK(traj.metrics.e_tot.front() == 0.0);
  for (std::size_t k = 1; k < traj.metrics.e_tot.size(); ++k)
    CHECK(traj.metrics.e_tot[k] >= traj.metrics.e_tot[k - 1]);
}
