#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "conslab/matrix.hpp"

namespace conslab {

using Vertex = std::size_t;

// Directed weighted edge source -> target. In the adjacency matrix the weight
// lands at (target, source): the source is an in-neighbor of the target.
struct Edge {
  Vertex source = 0;
  Vertex target = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// One incoming edge seen from its target.
struct InEdge {
  Vertex source;
  double weight;
};

// Immutable weighted digraph on vertices [0, n).
//
// Undirected graphs are stored with both orientations of every edge; the
// constructor verifies the pairing when `undirected` is set. Edges are kept
// sorted by (source, target), so two graphs with the same edge set compare
// equal regardless of insertion order.
class WeightedDigraph {
 public:
  // Throws std::invalid_argument on: n == 0, out-of-range vertex, self-loop,
  // non-positive or non-finite weight, duplicate edge, or an undirected claim
  // without a matching reverse edge of equal weight.
  WeightedDigraph(std::size_t n, std::vector<Edge> edges, bool undirected);

  // Builds an undirected graph from one orientation per edge ({i,j} listed
  // once); the reverse orientation is added here.
  static WeightedDigraph undirected_from_pairs(std::size_t n, const std::vector<Edge>& pairs);

  std::size_t vertex_count() const { return n_; }
  bool undirected() const { return undirected_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Incoming edges of vertex i in increasing source order. Unchecked index.
  std::span<const InEdge> in_edges(Vertex i) const {
    return {in_edges_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
  }

  bool has_edge(Vertex source, Vertex target) const;

  friend bool operator==(const WeightedDigraph& a, const WeightedDigraph& b) {
    return a.n_ == b.n_ && a.undirected_ == b.undirected_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_;
  bool undirected_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> in_offsets_;
  std::vector<InEdge> in_edges_;
};

// a_ij = weight of edge (j, i), zero otherwise.
DenseMatrix adjacency_matrix(const WeightedDigraph& g);

// Q = D - A with d_i the exact sum of row i of A, so rows sum to zero.
DenseMatrix laplacian(const WeightedDigraph& g);

// { j : (j, i) in E }. Throws std::out_of_range for i >= n.
std::vector<Vertex> in_neighbors(const WeightedDigraph& g, Vertex i);

// Unilateral connectivity: every pair {i, j} has a directed path i -> j or
// j -> i. Coincides with ordinary connectivity for undirected graphs.
bool is_connected(const WeightedDigraph& g);

// Components of the symmetrized graph. Each block is sorted and blocks are
// ordered by their smallest vertex.
std::vector<std::vector<Vertex>> weak_components(const WeightedDigraph& g);

// Edge-wise union; a repeated edge keeps the largest weight. The result is
// flagged undirected when every input is. Throws std::invalid_argument for an
// empty list or mismatched vertex counts.
WeightedDigraph union_graph(std::span<const WeightedDigraph> graphs);

// Second-smallest eigenvalue of the Laplacian of an undirected graph (0 for
// n == 1). Throws std::invalid_argument on directed input.
double algebraic_connectivity(const WeightedDigraph& g);

inline constexpr std::size_t kEdgeConnectivityMaxVertices = 12;

// Smallest number of undirected edges whose removal increases the number of
// components. Found by exhaustive search over vertex bipartitions of every
// component; 0 when no edge can be removed. Throws std::invalid_argument for
// directed input or n > kEdgeConnectivityMaxVertices.
std::size_t edge_connectivity(const WeightedDigraph& g);

// Undirected circulant: edge {i, (i + h) mod n} for every vertex i and offset
// h. Requires n >= 2, 1 <= h <= n/2 and weight > 0 (std::invalid_argument).
WeightedDigraph circulant_graph(std::size_t n, const std::vector<std::size_t>& offsets,
                                double weight = 1.0);

}  // namespace conslab
