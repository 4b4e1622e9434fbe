#include "conslab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace conslab {

WeightedDigraph::WeightedDigraph(std::size_t n, std::vector<Edge> edges, bool undirected)
    : n_(n), undirected_(undirected), edges_(std::move(edges)) {
  if (n_ == 0) throw std::invalid_argument("graph must have at least one vertex");
  for (const Edge& e : edges_) {
    if (e.source >= n_ || e.target >= n_) {
      throw std::invalid_argument("edge (" + std::to_string(e.source) + "," +
                                  std::to_string(e.target) + ") out of range for n=" +
                                  std::to_string(n_));
    }
    if (e.source == e.target) {
      throw std::invalid_argument("self-loop at vertex " + std::to_string(e.source));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw std::invalid_argument("edge weights must be positive and finite");
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.source, a.target) < std::pair(b.source, b.target);
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].source == edges_[k - 1].source && edges_[k].target == edges_[k - 1].target) {
      throw std::invalid_argument("duplicate edge (" + std::to_string(edges_[k].source) + "," +
                                  std::to_string(edges_[k].target) + ")");
    }
  }
  if (undirected_) {
    for (const Edge& e : edges_) {
      auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair(e.target, e.source),
                                 [](const Edge& a, const std::pair<Vertex, Vertex>& key) {
                                   return std::pair(a.source, a.target) < key;
                                 });
      if (it == edges_.end() || it->source != e.target || it->target != e.source ||
          it->weight != e.weight) {
        throw std::invalid_argument("graph flagged undirected but edge (" +
                                    std::to_string(e.source) + "," + std::to_string(e.target) +
                                    ") lacks an equal-weight reverse");
      }
    }
  }

  in_offsets_.assign(n_ + 1, 0);
  for (const Edge& e : edges_) ++in_offsets_[e.target + 1];
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
  in_edges_.resize(edges_.size());
  std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  // edges_ is sorted by source, so each in-list comes out sorted by source.
  for (const Edge& e : edges_) in_edges_[cursor[e.target]++] = InEdge{e.source, e.weight};
}

WeightedDigraph WeightedDigraph::undirected_from_pairs(std::size_t n,
                                                       const std::vector<Edge>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(2 * pairs.size());
  for (const Edge& e : pairs) {
    edges.push_back(e);
    edges.push_back(Edge{e.target, e.source, e.weight});
  }
  return WeightedDigraph(n, std::move(edges), true);
}

bool WeightedDigraph::has_edge(Vertex source, Vertex target) const {
  if (target >= n_) return false;
  for (const InEdge& in : in_edges(target))
    if (in.source == source) return true;
  return false;
}

DenseMatrix adjacency_matrix(const WeightedDigraph& g) {
  DenseMatrix a(g.vertex_count(), g.vertex_count());
  for (const Edge& e : g.edges()) a(e.target, e.source) = e.weight;
  return a;
}

DenseMatrix laplacian(const WeightedDigraph& g) {
  const std::size_t n = g.vertex_count();
  DenseMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (const InEdge& in : g.in_edges(i)) {
      q(i, in.source) = -in.weight;
      degree += in.weight;
    }
    q(i, i) = degree;
  }
  return q;
}

std::vector<Vertex> in_neighbors(const WeightedDigraph& g, Vertex i) {
  if (i >= g.vertex_count()) {
    throw std::out_of_range("vertex " + std::to_string(i) + " out of range");
  }
  std::vector<Vertex> out;
  for (const InEdge& in : g.in_edges(i)) out.push_back(in.source);
  return out;
}

namespace {

// reach[i * n + j] == true iff j is reachable from i along directed edges.
std::vector<char> reachability(const WeightedDigraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<Vertex>> out(n);
  for (const Edge& e : g.edges()) out[e.source].push_back(e.target);

  std::vector<char> reach(n * n, 0);
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    char* row = reach.data() + s * n;
    row[s] = 1;
    stack.assign(1, s);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : out[v]) {
        if (!row[w]) {
          row[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return reach;
}

Vertex find_root(std::vector<Vertex>& parent, Vertex v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

bool is_connected(const WeightedDigraph& g) {
  const std::size_t n = g.vertex_count();
  const std::vector<char> reach = reachability(g);
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j)
      if (!reach[i * n + j] && !reach[j * n + i]) return false;
  return true;
}

std::vector<std::vector<Vertex>> weak_components(const WeightedDigraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<Vertex> parent(n);
  std::iota(parent.begin(), parent.end(), Vertex{0});
  for (const Edge& e : g.edges()) {
    const Vertex a = find_root(parent, e.source);
    const Vertex b = find_root(parent, e.target);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Roots are the smallest vertex of each block after the min-linking above.
  std::map<Vertex, std::vector<Vertex>> blocks;
  for (Vertex v = 0; v < n; ++v) blocks[find_root(parent, v)].push_back(v);
  std::vector<std::vector<Vertex>> out;
  out.reserve(blocks.size());
  for (auto& [root, members] : blocks) out.push_back(std::move(members));
  return out;
}

WeightedDigraph union_graph(std::span<const WeightedDigraph> graphs) {
  if (graphs.empty()) throw std::invalid_argument("union of an empty graph list");
  const std::size_t n = graphs.front().vertex_count();
  bool undirected = true;
  std::map<std::pair<Vertex, Vertex>, double> merged;
  for (const WeightedDigraph& g : graphs) {
    if (g.vertex_count() != n) {
      throw std::invalid_argument("union of graphs with different vertex counts");
    }
    undirected = undirected && g.undirected();
    for (const Edge& e : g.edges()) {
      auto [it, inserted] = merged.try_emplace({e.source, e.target}, e.weight);
      if (!inserted) it->second = std::max(it->second, e.weight);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(merged.size());
  for (const auto& [key, w] : merged) edges.push_back(Edge{key.first, key.second, w});
  return WeightedDigraph(n, std::move(edges), undirected);
}

double algebraic_connectivity(const WeightedDigraph& g) {
  if (!g.undirected()) {
    throw std::invalid_argument("algebraic connectivity requires an undirected graph");
  }
  if (g.vertex_count() == 1) return 0.0;
  const std::vector<double> eig = symmetric_eigenvalues(laplacian(g));
  return std::max(0.0, eig[1]);
}

std::size_t edge_connectivity(const WeightedDigraph& g) {
  if (!g.undirected()) {
    throw std::invalid_argument("edge connectivity requires an undirected graph");
  }
  if (g.vertex_count() > kEdgeConnectivityMaxVertices) {
    throw std::invalid_argument("edge connectivity search limited to n <= " +
                                std::to_string(kEdgeConnectivityMaxVertices));
  }
  const std::size_t n = g.vertex_count();
  std::size_t best = 0;
  bool found = false;
  std::vector<std::size_t> position(n);
  for (const std::vector<Vertex>& block : weak_components(g)) {
    const std::size_t size = block.size();
    if (size < 2) continue;
    for (std::size_t k = 0; k < size; ++k) position[block[k]] = k;
    // Subsets containing block[0] (bit 0 always set), excluding the full block.
    const unsigned full = (1u << size) - 1u;
    for (unsigned mask = 1; mask < full; mask += 2) {
      std::size_t crossing = 0;
      for (Vertex v : block) {
        for (const InEdge& in : g.in_edges(v)) {
          if (in.source < v) {
            const bool a = (mask >> position[v]) & 1u;
            const bool b = (mask >> position[in.source]) & 1u;
            if (a != b) ++crossing;
          }
        }
      }
      if (!found || crossing < best) {
        best = crossing;
        found = true;
      }
    }
  }
  return best;
}

WeightedDigraph circulant_graph(std::size_t n, const std::vector<std::size_t>& offsets,
                                double weight) {
  if (n < 2) throw std::invalid_argument("circulant graph needs n >= 2");
  if (!(weight > 0.0)) throw std::invalid_argument("circulant weight must be positive");
  std::map<std::pair<Vertex, Vertex>, double> pairs;
  for (std::size_t h : offsets) {
    if (h < 1 || h > n / 2) {
      throw std::invalid_argument("circulant offset " + std::to_string(h) +
                                  " outside [1, " + std::to_string(n / 2) + "]");
    }
    for (Vertex i = 0; i < n; ++i) {
      const Vertex j = (i + h) % n;
      pairs[{std::min(i, j), std::max(i, j)}] = weight;
    }
  }
  std::vector<Edge> half;
  half.reserve(pairs.size());
  for (const auto& [key, w] : pairs) half.push_back(Edge{key.first, key.second, w});
  return WeightedDigraph::undirected_from_pairs(n, half);
}

}  // namespace conslab
