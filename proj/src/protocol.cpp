#include "conslab/protocol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conslab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_gain(double k, const char* name) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double signed_power(double x, double a) {
  if (x == 0.0) return 0.0;
  const double m = std::pow(std::abs(x), a);
  return x > 0.0 ? m : -m;
}

NodeFunction NodeFunction::linear(double k) {
  require_gain(k, "k");
  return NodeFunction(LinearFn{k});
}

NodeFunction NodeFunction::sign(double k) {
  require_gain(k, "k");
  return NodeFunction(SignFn{k});
}

NodeFunction NodeFunction::power(double k, double alpha) {
  require_gain(k, "k");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  return NodeFunction(PowerFn{k, alpha});
}

NodeFunction NodeFunction::fixed_time(double k1, double k2, double p, double q) {
  require_gain(k1, "k1");
  require_gain(k2, "k2");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("q must be greater than 1");
  return NodeFunction(FixedTimeFn{k1, k2, p, q});
}

std::string NodeFunction::name() const {
  return std::visit(Overloaded{
                        [](const LinearFn&) { return std::string("linear"); },
                        [](const SignFn&) { return std::string("sign"); },
                        [](const PowerFn&) { return std::string("power"); },
                        [](const FixedTimeFn&) { return std::string("fixed_time"); },
                    },
                    kind_);
}

double NodeFunction::operator()(double x) const {
  return std::visit(Overloaded{
                        [x](const LinearFn& f) { return f.k * x; },
                        [x](const SignFn& f) { return f.k * sign_of(x); },
                        [x](const PowerFn& f) { return f.k * signed_power(x, f.alpha); },
                        [x](const FixedTimeFn& f) {
                          return f.k1 * signed_power(x, f.p) + f.k2 * signed_power(x, f.q);
                        },
                    },
                    kind_);
}

bool operator==(const NodeFunction& a, const NodeFunction& b) {
  if (a.kind_.index() != b.kind_.index()) return false;
  return std::visit(Overloaded{
                        [&](const LinearFn& f) { return f.k == std::get<LinearFn>(b.kind_).k; },
                        [&](const SignFn& f) { return f.k == std::get<SignFn>(b.kind_).k; },
                        [&](const PowerFn& f) {
                          const auto& g = std::get<PowerFn>(b.kind_);
                          return f.k == g.k && f.alpha == g.alpha;
                        },
                        [&](const FixedTimeFn& f) {
                          const auto& g = std::get<FixedTimeFn>(b.kind_);
                          return f.k1 == g.k1 && f.k2 == g.k2 && f.p == g.p && f.q == g.q;
                        },
                    },
                    a.kind_);
}

double eval_f(const NodeFunction& f, double x) { return f(x); }

std::string to_string(Direction d) {
  return d == Direction::kPerEdge ? "per_edge" : "aggregated";
}

std::vector<double> consensus_error(const WeightedDigraph& g, std::span<const double> x) {
  const std::size_t n = g.vertex_count();
  if (x.size() != n) throw std::invalid_argument("state dimension does not match the graph");
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const InEdge& in : g.in_edges(i)) acc += in.weight * (x[in.source] - x[i]);
    e[i] = acc;
  }
  return e;
}

void control_into(const Protocol& p, const WeightedDigraph& g, std::span<const double> x,
                  std::span<double> u) {
  const std::size_t n = g.vertex_count();
  if (x.size() != n || u.size() != n) {
    throw std::invalid_argument("state dimension does not match the graph");
  }
  const NodeFunction& f = p.f;
  if (p.direction == Direction::kAggregated) {
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (const InEdge& in : g.in_edges(i)) e += in.weight * (x[in.source] - x[i]);
      u[i] = f(e);
    }
    return;
  }
  if (const auto* s = std::get_if<SignFn>(&f.kind())) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const InEdge& in : g.in_edges(i)) acc += sign_of(x[in.source] - x[i]);
      u[i] = s->k * acc;
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const InEdge& in : g.in_edges(i)) acc += in.weight * f(x[in.source] - x[i]);
    u[i] = acc;
  }
}

std::vector<double> control(const Protocol& p, const WeightedDigraph& g,
                            std::span<const double> x) {
  std::vector<double> u(g.vertex_count(), 0.0);
  control_into(p, g, x, u);
  return u;
}

HomogeneityFit homogeneity_degree_estimate(const NodeFunction& f,
                                           std::span<const double> x_samples,
                                           std::span<const double> lambda_samples) {
  if (x_samples.size() < 3 || lambda_samples.size() < 3) {
    throw std::invalid_argument("homogeneity fit needs at least 3 x and 3 lambda samples");
  }
  for (double x : x_samples)
    if (x == 0.0 || !std::isfinite(x)) throw std::invalid_argument("x samples must be nonzero");
  std::vector<double> log_lambda;
  double mean_log_lambda = 0.0;
  for (double l : lambda_samples) {
    if (!(l > 0.0) || l == 1.0 || !std::isfinite(l)) {
      throw std::invalid_argument("lambda samples must be positive and different from 1");
    }
    log_lambda.push_back(std::log(l));
    mean_log_lambda += log_lambda.back();
  }
  mean_log_lambda /= static_cast<double>(log_lambda.size());

  double sxx = 0.0;
  for (double ll : log_lambda) sxx += (ll - mean_log_lambda) * (ll - mean_log_lambda);
  if (sxx == 0.0) throw std::invalid_argument("lambda samples must not all be equal");

  // Centred log|f(lambda x)| per x sample.
  std::vector<std::vector<double>> centred;
  double sxy = 0.0;
  for (double x : x_samples) {
    std::vector<double> y;
    double mean_y = 0.0;
    for (double l : lambda_samples) {
      const double v = f(l * x);
      if (v == 0.0 || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "f vanishes or overflows at " << l * x << "; degree fit is degenerate";
        throw std::domain_error(msg.str());
      }
      y.push_back(std::log(std::abs(v)));
      mean_y += y.back();
    }
    mean_y /= static_cast<double>(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] -= mean_y;
      sxy += (log_lambda[k] - mean_log_lambda) * y[k];
    }
    centred.push_back(std::move(y));
  }
  const double slope = sxy / (sxx * static_cast<double>(x_samples.size()));

  double residual = 0.0;
  for (const auto& y : centred)
    for (std::size_t k = 0; k < y.size(); ++k)
      residual = std::max(residual, std::abs(y[k] - slope * (log_lambda[k] - mean_log_lambda)));
  return HomogeneityFit{slope - 1.0, residual};
}

NodeFunction limit_function(const NodeFunction& f, LimitEnd end) {
  if (const auto* ft = std::get_if<FixedTimeFn>(&f.kind())) {
    return end == LimitEnd::kZero ? NodeFunction(PowerFn{ft->k1, ft->p})
                                  : NodeFunction(PowerFn{ft->k2, ft->q});
  }
  return f;
}

}  // namespace conslab
