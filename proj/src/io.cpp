#include "conslab/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace conslab::io {

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

WeightedDigraph graph_from_json(const json& j) {
  const auto n = field<std::int64_t>(j, "n");
  if (n <= 0) throw InputError("graph field \"n\" must be positive");
  const bool undirected = j.contains("undirected") ? field<bool>(j, "undirected") : false;
  if (!j.contains("edges") || !j.at("edges").is_array()) {
    throw InputError("graph field \"edges\" must be an array");
  }
  std::vector<Edge> edges;
  std::map<std::pair<Vertex, Vertex>, double> pairs;
  for (const json& e : j.at("edges")) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) {
      throw InputError("each edge must be [i, j] or [i, j, w]");
    }
    const auto src = e[0].get<std::int64_t>();
    const auto dst = e[1].get<std::int64_t>();
    const double w = e.size() == 3 ? e[2].get<double>() : 1.0;
    if (src < 0 || dst < 0) throw InputError("edge endpoints must be non-negative");
    const auto a = static_cast<Vertex>(src);
    const auto b = static_cast<Vertex>(dst);
    if (undirected) {
      auto [it, inserted] = pairs.try_emplace({std::min(a, b), std::max(a, b)}, w);
      if (!inserted && it->second != w) {
        throw InputError("undirected edge {" + std::to_string(a) + "," + std::to_string(b) +
                         "} listed with different weights");
      }
    } else {
      edges.push_back(Edge{a, b, w});
    }
  }
  try {
    if (undirected) {
      std::vector<Edge> half;
      for (const auto& [key, w] : pairs) half.push_back(Edge{key.first, key.second, w});
      return WeightedDigraph::undirected_from_pairs(static_cast<std::size_t>(n), half);
    }
    return WeightedDigraph(static_cast<std::size_t>(n), std::move(edges), false);
  } catch (const std::invalid_argument& err) {
    throw InputError(err.what());
  }
}

json graph_to_json(const WeightedDigraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    if (g.undirected() && e.source > e.target) continue;
    edges.push_back(json::array({e.source, e.target, e.weight}));
  }
  return json{{"n", g.vertex_count()}, {"undirected", g.undirected()}, {"edges", edges}};
}

SwitchingSignal signal_from_json(const json& j) {
  const auto type = field<std::string>(j, "type");
  const double t0 = j.contains("t0") ? field<double>(j, "t0") : 0.0;
  try {
    if (type == "floor_modulo") {
      const auto modulus = field<std::int64_t>(j, "modulus");
      const auto offset = j.contains("offset") ? field<std::int64_t>(j, "offset") : 0;
      if (modulus <= 0 || offset < 0) {
        throw InputError("signal modulus must be positive and offset non-negative");
      }
      return SwitchingSignal::floor_modulo(field<double>(j, "rate"),
                                           static_cast<std::size_t>(modulus),
                                           static_cast<std::size_t>(offset), t0);
    }
    if (type == "breakpoints") {
      return SwitchingSignal::breakpoints(field<std::vector<double>>(j, "times"),
                                          field<std::vector<std::size_t>>(j, "indices"), t0);
    }
  } catch (const std::invalid_argument& err) {
    throw InputError(err.what());
  }
  throw InputError("unknown signal type \"" + type + "\"");
}

json signal_to_json(const SwitchingSignal& s) {
  json out;
  if (const auto* f = std::get_if<FloorModulo>(&s.kind())) {
    out = json{{"type", "floor_modulo"},
               {"rate", f->rate},
               {"modulus", f->modulus},
               {"offset", f->offset}};
  } else {
    const auto& b = std::get<Breakpoints>(s.kind());
    out = json{{"type", "breakpoints"}, {"times", b.times}, {"indices", b.indices}};
  }
  out["t0"] = s.t0();
  return out;
}

DynamicNetwork network_from_json(const json& j) {
  if (!j.is_object() || !j.contains("signal") || !j.contains("graphs") ||
      !j.at("graphs").is_array()) {
    throw InputError("network needs \"signal\" and an array \"graphs\"");
  }
  std::vector<WeightedDigraph> family;
  for (const json& g : j.at("graphs")) family.push_back(graph_from_json(g));
  try {
    return DynamicNetwork(std::move(family), signal_from_json(j.at("signal")));
  } catch (const std::invalid_argument& err) {
    throw InputError(err.what());
  }
}

json network_to_json(const DynamicNetwork& net) {
  json graphs = json::array();
  for (const WeightedDigraph& g : net.family()) graphs.push_back(graph_to_json(g));
  return json{{"signal", signal_to_json(net.signal())}, {"graphs", graphs}};
}

Protocol protocol_from_json(const json& j) {
  const auto dir = field<std::string>(j, "direction");
  Direction direction;
  if (dir == "per_edge") {
    direction = Direction::kPerEdge;
  } else if (dir == "aggregated") {
    direction = Direction::kAggregated;
  } else {
    throw InputError("unknown protocol direction \"" + dir + "\"");
  }
  if (!j.contains("f")) throw InputError("protocol needs a node function \"f\"");
  const json& f = j.at("f");
  const auto type = field<std::string>(f, "type");
  try {
    if (type == "linear") return Protocol{direction, NodeFunction::linear(field<double>(f, "k"))};
    if (type == "sign") return Protocol{direction, NodeFunction::sign(field<double>(f, "k"))};
    if (type == "power") {
      return Protocol{direction,
                      NodeFunction::power(field<double>(f, "k"), field<double>(f, "alpha"))};
    }
    if (type == "fixed_time") {
      return Protocol{direction,
                      NodeFunction::fixed_time(field<double>(f, "k1"), field<double>(f, "k2"),
                                               field<double>(f, "p"), field<double>(f, "q"))};
    }
  } catch (const std::invalid_argument& err) {
    throw InputError(err.what());
  }
  throw InputError("unknown node function type \"" + type + "\"");
}

json protocol_to_json(const Protocol& p) {
  json f = std::visit(
      [](const auto& fn) -> json {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, LinearFn>) return {{"type", "linear"}, {"k", fn.k}};
        if constexpr (std::is_same_v<T, SignFn>) return {{"type", "sign"}, {"k", fn.k}};
        if constexpr (std::is_same_v<T, PowerFn>) {
          return {{"type", "power"}, {"k", fn.k}, {"alpha", fn.alpha}};
        }
        if constexpr (std::is_same_v<T, FixedTimeFn>) {
          return {{"type", "fixed_time"}, {"k1", fn.k1}, {"k2", fn.k2}, {"p", fn.p}, {"q", fn.q}};
        }
      },
      p.f.kind());
  return json{{"direction", to_string(p.direction)}, {"f", f}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& err) {
    throw InputError(path.string() + ": " + err.what());
  }
}

namespace {

template <class F>
auto load_with_context(const std::filesystem::path& path, F&& parse) {
  const json j = read_json_file(path);
  try {
    return parse(j);
  } catch (const InputError& err) {
    throw InputError(path.string() + ": " + err.what());
  } catch (const json::exception& err) {
    throw InputError(path.string() + ": " + err.what());
  }
}

}  // namespace

WeightedDigraph load_graph(const std::filesystem::path& path) {
  return load_with_context(path, graph_from_json);
}

DynamicNetwork load_network(const std::filesystem::path& path) {
  return load_with_context(path, network_from_json);
}

Protocol load_protocol(const std::filesystem::path& path) {
  return load_with_context(path, protocol_from_json);
}

std::vector<double> load_x0(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<double> x;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double v;
    std::string rest;
    if (!(ss >> v) || (ss >> rest)) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected one number");
    }
    x.push_back(v);
  }
  if (x.empty()) throw InputError(path.string() + ": no initial conditions");
  return x;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t";
  for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
  out << ",V,E_tot\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_double(traj.times[k]);
    for (double xi : traj.states[k]) out << ',' << format_double(xi);
    out << ',' << format_double(traj.metrics.v[k]) << ',' << format_double(traj.metrics.e_tot[k])
        << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const MetricSeries& metrics, bool per_node) {
  per_node = per_node && !metrics.e_node.empty();
  const std::size_t n = per_node ? metrics.e_node.front().size() : 0;
  out << "t,V,E_tot";
  for (std::size_t i = 0; i < n; ++i) out << ",E_" << i;
  out << '\n';
  for (std::size_t k = 0; k < metrics.times.size(); ++k) {
    out << format_double(metrics.times[k]) << ',' << format_double(metrics.v[k]) << ','
        << format_double(metrics.e_tot[k]);
    if (per_node)
      for (double e : metrics.e_node[k]) out << ',' << format_double(e);
    out << '\n';
  }
}

void write_events_csv(std::ostream& out, const std::vector<SwitchEvent>& events) {
  out << "t,from,to\n";
  for (const SwitchEvent& e : events) {
    out << format_double(e.time) << ',' << e.from << ',' << e.to << '\n';
  }
}

void write_results_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  out << "n,lambda2,protocol,direction,k,k1,k2,settling_time,E_tot,dt,epsilon\n";
  for (const BenchmarkRow& r : rows) {
    out << r.n << ',' << format_double(r.lambda2) << ',' << r.protocol << ','
        << to_string(r.direction) << ',' << format_double(r.k) << ',' << opt(r.k1) << ','
        << opt(r.k2) << ',' << opt(r.settling_time) << ',' << format_double(r.effort) << ','
        << format_double(r.dt) << ',' << format_double(r.epsilon) << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << contents;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace conslab::io
