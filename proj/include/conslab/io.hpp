#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "conslab/benchmark.hpp"
#include "conslab/graph.hpp"
#include "conslab/protocol.hpp"
#include "conslab/simulator.hpp"
#include "conslab/switching.hpp"

namespace conslab::io {

using nlohmann::json;

// Malformed or missing input; the message names the offending file or field.
class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// {"n": int, "undirected": bool, "edges": [[i, j, w], ...]}. Undirected
// graphs may list each pair once in either orientation (or both, with equal
// weights); they are written with i < j only.
WeightedDigraph graph_from_json(const json& j);
json graph_to_json(const WeightedDigraph& g);

// {"type": "floor_modulo", "rate", "modulus", "offset"} or
// {"type": "breakpoints", "times", "indices"}; optional "t0".
SwitchingSignal signal_from_json(const json& j);
json signal_to_json(const SwitchingSignal& s);

// {"signal": {...}, "graphs": [graph, ...]}
DynamicNetwork network_from_json(const json& j);
json network_to_json(const DynamicNetwork& net);

// {"direction": "per_edge" | "aggregated",
//  "f": {"type": "linear" | "sign" | "power" | "fixed_time", "k", "alpha", "k1", "k2", "p", "q"}}
Protocol protocol_from_json(const json& j);
json protocol_to_json(const Protocol& p);

// All loaders wrap parse and validation failures in InputError.
json read_json_file(const std::filesystem::path& path);
WeightedDigraph load_graph(const std::filesystem::path& path);
DynamicNetwork load_network(const std::filesystem::path& path);
Protocol load_protocol(const std::filesystem::path& path);
// One float per line; blank lines and lines starting with '#' are skipped.
std::vector<double> load_x0(const std::filesystem::path& path);

// printf("%.17g").
std::string format_double(double v);

// t,x_0,...,x_{n-1},V,E_tot
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
// t,V,E_tot[,E_0,...]
void write_metrics_csv(std::ostream& out, const MetricSeries& metrics, bool per_node);
// t,from,to
void write_events_csv(std::ostream& out, const std::vector<SwitchEvent>& events);
// n,lambda2,protocol,direction,k,k1,k2,settling_time,E_tot,dt,epsilon
void write_results_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace conslab::io
