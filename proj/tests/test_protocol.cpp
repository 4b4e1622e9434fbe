#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "conslab/protocol.hpp"
#include "oracles.hpp"

using namespace conslab;

namespace {

std::vector<double> random_state(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

const std::vector<double> kXs{-3.0, -0.7, 0.01, 0.5, 2.0, 40.0};
const std::vector<double> kLambdas{1e-3, 0.05, 0.5, 2.0, 30.0, 1e3};

}  // namespace

TEST_CASE("node function values") {
  CHECK(NodeFunction::linear(2.0)(-1.5) == -3.0);
  CHECK(NodeFunction::sign(3.0)(-1e-300) == -3.0);
  CHECK(NodeFunction::sign(3.0)(0.0) == 0.0);
  CHECK(NodeFunction::power(2.0, 0.5)(4.0) == 4.0);
  CHECK(NodeFunction::power(2.0, 0.5)(-4.0) == -4.0);
  CHECK(NodeFunction::fixed_time(1.0, 2.0, 0.5, 1.5)(4.0) == doctest::Approx(2.0 + 16.0));
  CHECK(eval_f(NodeFunction::fixed_time(1.0, 2.0, 0.5, 1.5), -4.0) == doctest::Approx(-18.0));
  CHECK(signed_power(0.0, 0.5) == 0.0);
  CHECK(signed_power(-8.0, 1.0 / 3.0) == doctest::Approx(-2.0));

  CHECK(NodeFunction::linear(1).name() == "linear");
  CHECK(NodeFunction::sign(1).name() == "sign");
  CHECK(NodeFunction::power(1, 0.5).name() == "power");
  CHECK(NodeFunction::fixed_time(1, 1, 0.5, 1.5).name() == "fixed_time");
  CHECK(to_string(Direction::kPerEdge) == "per_edge");
  CHECK(to_string(Direction::kAggregated) == "aggregated");
}

TEST_CASE("node functions are odd") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  const std::vector<NodeFunction> fs{NodeFunction::linear(1.3), NodeFunction::sign(0.4),
                                     NodeFunction::power(2.0, 0.3),
                                     NodeFunction::fixed_time(1.0, 0.5, 0.2, 2.5)};
  for (const auto& f : fs)
    for (int k = 0; k < 100; ++k) {
      const double x = d(rng);
      CHECK(f(-x) == -f(x));
    }
}

TEST_CASE("node function parameter validation") {
  CHECK_THROWS_AS(NodeFunction::linear(0.0), std::invalid_argument);
  CHECK_THROWS_AS(NodeFunction::sign(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(NodeFunction::power(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NodeFunction::power(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NodeFunction::power(INFINITY, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(NodeFunction::fixed_time(1, 1, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(NodeFunction::fixed_time(1, 1, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NodeFunction::fixed_time(1, 0, 0.5, 1.5), std::invalid_argument);
}

TEST_CASE("consensus error equals minus Laplacian times state") {
  std::mt19937 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto g = trial % 2 ? oracle::random_undirected(rng, n, 0.5)
                             : oracle::random_directed(rng, n, 0.4);
    const auto x = random_state(rng, n);
    const auto qx = laplacian(g).multiply(x);
    const auto e = consensus_error(g, x);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e[i] + qx[i]) <= 1e-12);
  }
  CHECK_THROWS_AS(consensus_error(circulant_graph(4, {1}), std::vector<double>(3)),
                  std::invalid_argument);
}

TEST_CASE("control laws against componentwise definitions") {
  std::mt19937 rng(33);
  const std::vector<NodeFunction> fs{NodeFunction::linear(1.3), NodeFunction::sign(0.4),
                                     NodeFunction::power(2.0, 0.5),
                                     NodeFunction::fixed_time(1.0, 0.5, 0.5, 1.5)};
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto g = trial % 2 ? oracle::random_undirected(rng, n, 0.5)
                             : oracle::random_directed(rng, n, 0.4);
    const auto a = adjacency_matrix(g);
    const auto x = random_state(rng, n);
    for (const auto& f : fs) {
      const bool is_sign = f.name() == "sign";
      const auto pe = control({Direction::kPerEdge, f}, g, x);
      const auto ag = control({Direction::kAggregated, f}, g, x);
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0, e = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (a(i, j) == 0.0) continue;
          sum += is_sign ? f(x[j] - x[i]) : a(i, j) * f(x[j] - x[i]);
          e += a(i, j) * (x[j] - x[i]);
        }
        CHECK(pe[i] == doctest::Approx(sum).epsilon(1e-12));
        CHECK(ag[i] == doctest::Approx(f(e)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("per-edge sign protocol ignores edge weights") {
  auto heavy = WeightedDigraph::undirected_from_pairs(3, {{0, 1, 5.0}, {1, 2, 0.1}});
  const std::vector<double> x{0.0, 1.0, 3.0};
  const auto u = control({Direction::kPerEdge, NodeFunction::sign(2.0)}, heavy, x);
  CHECK(u == std::vector<double>{2.0, 0.0, -2.0});
}

TEST_CASE("undirected per-edge protocols conserve the state sum") {
  std::mt19937 rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::random_undirected(rng, 6, 0.5);
    const auto x = random_state(rng, 6);
    const auto u = control({Direction::kPerEdge, NodeFunction::power(1.0, 0.5)}, g, x);
    double s = 0.0;
    for (double v : u) s += v;
    CHECK(std::abs(s) < 1e-11);
  }
}

TEST_CASE("linear protocol is the same in both directions") {
  std::mt19937 rng(35);
  const auto g = oracle::random_directed(rng, 7, 0.5);
  const auto x = random_state(rng, 7);
  const auto pe = control({Direction::kPerEdge, NodeFunction::linear(0.8)}, g, x);
  const auto ag = control({Direction::kAggregated, NodeFunction::linear(0.8)}, g, x);
  for (std::size_t i = 0; i < 7; ++i) CHECK(pe[i] == doctest::Approx(ag[i]).epsilon(1e-12));
}

TEST_CASE("homogeneity degree of homogeneous functions") {
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto fit = homogeneity_degree_estimate(NodeFunction::power(3.0, alpha), kXs, kLambdas);
    CHECK(std::abs(fit.degree - (alpha - 1.0)) < 1e-9);
    CHECK(fit.max_residual < 1e-9);
  }
  CHECK(std::abs(homogeneity_degree_estimate(NodeFunction::linear(2.0), kXs, kLambdas).degree) < 1e-9);
  CHECK(homogeneity_degree_estimate(NodeFunction::sign(2.0), kXs, kLambdas).degree ==
        doctest::Approx(-1.0));
}

TEST_CASE("fixed-time function is not homogeneous") {
  const auto fit =
      homogeneity_degree_estimate(NodeFunction::fixed_time(1, 1, 0.5, 1.5), kXs, kLambdas);
  CHECK(fit.max_residual > 0.1);
}

TEST_CASE("homogeneity input validation") {
  const auto f = NodeFunction::power(1, 0.5);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(homogeneity_degree_estimate(f, two, kLambdas), std::invalid_argument);
  CHECK_THROWS_AS(homogeneity_degree_estimate(f, kXs, two), std::invalid_argument);
  const std::vector<double> with_zero{1.0, 0.0, 2.0};
  CHECK_THROWS_AS(homogeneity_degree_estimate(f, with_zero, kLambdas), std::invalid_argument);
  const std::vector<double> with_one{0.5, 1.0, 2.0};
  CHECK_THROWS_AS(homogeneity_degree_estimate(f, kXs, with_one), std::invalid_argument);
  const std::vector<double> negative{-0.5, 2.0, 3.0};
  CHECK_THROWS_AS(homogeneity_degree_estimate(f, kXs, negative), std::invalid_argument);
  // Underflow makes f vanish at the sample.
  const std::vector<double> tiny{1e-320, 1e-321, 1e-322};
  CHECK_THROWS_AS(homogeneity_degree_estimate(NodeFunction::linear(1), kXs, tiny),
                  std::domain_error);
}

TEST_CASE("limit functions of the fixed-time law") {
  const auto f = NodeFunction::fixed_time(2.0, 3.0, 0.4, 1.7);
  const auto f0 = limit_function(f, LimitEnd::kZero);
  const auto finf = limit_function(f, LimitEnd::kInfinity);
  REQUIRE(std::holds_alternative<PowerFn>(f0.kind()));
  REQUIRE(std::holds_alternative<PowerFn>(finf.kind()));
  CHECK(std::get<PowerFn>(f0.kind()).k == 2.0);
  CHECK(std::get<PowerFn>(f0.kind()).alpha == 0.4);
  CHECK(std::get<PowerFn>(finf.kind()).k == 3.0);
  CHECK(std::get<PowerFn>(finf.kind()).alpha == 1.7);

  // The scaled law converges to its limits.
  for (double x : kXs) {
    const double small = 1e-8, large = 1e8;
    CHECK(f(small * x) / std::pow(small, 0.4) == doctest::Approx(f0(x)).epsilon(1e-3));
    CHECK(f(large * x) / std::pow(large, 1.7) == doctest::Approx(finf(x)).epsilon(1e-3));
  }

  const auto p = NodeFunction::power(1.0, 0.5);
  CHECK(limit_function(p, LimitEnd::kZero) == p);
  CHECK(limit_function(p, LimitEnd::kInfinity) == p);
}
