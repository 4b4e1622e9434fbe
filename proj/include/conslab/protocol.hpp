#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "conslab/graph.hpp"

namespace conslab {

enum class LimitEnd { kZero, kInfinity };

struct LinearFn {
  double k;
};
struct SignFn {
  double k;
};
// k * |x|^alpha * sign(x).
struct PowerFn {
  double k;
  double alpha;
};
// k1 * |x|^p * sign(x) + k2 * |x|^q * sign(x).
struct FixedTimeFn {
  double k1;
  double k2;
  double p;
  double q;
};

// Scalar odd nonlinearity f with f(0) = 0. Constructed only through the
// validating factories.
class NodeFunction {
 public:
  using Variant = std::variant<LinearFn, SignFn, PowerFn, FixedTimeFn>;

  // Throw std::invalid_argument for parameters outside their admissible range:
  // gains > 0, alpha in (0, 1), 0 < p < 1 < q.
  static NodeFunction linear(double k);
  static NodeFunction sign(double k);
  static NodeFunction power(double k, double alpha);
  static NodeFunction fixed_time(double k1, double k2, double p, double q);

  const Variant& kind() const { return kind_; }
  std::string name() const;

  double operator()(double x) const;

  friend bool operator==(const NodeFunction&, const NodeFunction&);

 private:
  explicit NodeFunction(Variant v) : kind_(v) {}
  friend NodeFunction limit_function(const NodeFunction&, LimitEnd);

  Variant kind_;
};

double eval_f(const NodeFunction& f, double x);

// |x|^a * sign(x), exactly zero at x == 0.
double signed_power(double x, double a);

enum class Direction {
  kPerEdge,     // u_i = sum_j a_ij f(x_j - x_i)
  kAggregated,  // u_i = f(sum_j a_ij (x_j - x_i))
};

std::string to_string(Direction d);

struct Protocol {
  Direction direction;
  NodeFunction f;
};

// e = -Q x, evaluated edge by edge. Throws std::invalid_argument on a
// dimension mismatch.
std::vector<double> consensus_error(const WeightedDigraph& g, std::span<const double> x);

// Control law for every node. The per-edge sign protocol sums
// k * sign(x_j - x_i) without edge weights; every other per-edge variant
// weights each term by a_ij.
std::vector<double> control(const Protocol& p, const WeightedDigraph& g,
                            std::span<const double> x);

// Allocation-free form used by the integrator; `u` must have size n.
void control_into(const Protocol& p, const WeightedDigraph& g, std::span<const double> x,
                  std::span<double> u);

struct HomogeneityFit {
  double degree;        // d in f(lambda x) = lambda^(d+1) f(x)
  double max_residual;  // in log space
};

// Least-squares slope of log|f(lambda x)| against log(lambda), with one
// intercept per x sample, giving d + 1. A homogeneous f has zero residual.
// Requires >= 3 samples of each kind, x != 0, lambda > 0 and lambda != 1;
// throws std::invalid_argument otherwise and std::domain_error when f
// vanishes at a sample.
HomogeneityFit homogeneity_degree_estimate(const NodeFunction& f,
                                           std::span<const double> x_samples,
                                           std::span<const double> lambda_samples);

// Limit of lambda^-(d+1) f(lambda x) as lambda -> 0 or infinity. For the
// fixed-time function this is the k1 |x|^p or k2 |x|^q branch, returned as a
// power function (exponent q > 1 is admitted only here). Homogeneous variants
// are returned unchanged.
NodeFunction limit_function(const NodeFunction& f, LimitEnd end);

}  // namespace conslab
