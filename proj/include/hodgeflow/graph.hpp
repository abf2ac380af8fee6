#pragma once

#include "hodgeflow/types.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace hodgeflow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Edge {
  Index tail = 0;
  Index head = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Simple undirected graph with a canonical orientation on every edge.
//
// Edges are stored once per unordered node pair as (tail, head) with
// tail < head, sorted lexicographically. Edge i of every EdgeFlow refers to
// edges()[i].
class FlowGraph {
public:
  FlowGraph() = default;

  Index node_count() const noexcept { return node_count_; }
  Index edge_count() const noexcept { return static_cast<Index>(edges_.size()); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(Index e) const { return edges_[static_cast<std::size_t>(e)]; }

  // Sorted neighbor list of node v.
  const std::vector<Index>& neighbors(Index v) const {
    return adjacency_[static_cast<std::size_t>(v)];
  }
  Index degree(Index v) const { return static_cast<Index>(neighbors(v).size()); }

  bool has_coords() const noexcept { return coords_.has_value(); }
  const std::vector<Point2>& coords() const;

  // Index of edge {u, v} in edges(), or -1 if absent. Order of u, v is free.
  Index find_edge(Index u, Index v) const;

  friend bool operator==(const FlowGraph& a, const FlowGraph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_ && a.coords_ == b.coords_;
  }

private:
  friend struct GraphBuilder;

  Index node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adjacency_;
  std::optional<std::vector<Point2>> coords_;
};

// Result of canonicalizing a raw edge list.
struct BuildResult {
  FlowGraph graph;
  // flipped[i] is true when raw edge i was stored reversed (its flow must be
  // negated).
  std::vector<bool> flipped;
  // edge_of[i] is the canonical edge index raw edge i was mapped to.
  std::vector<Index> edge_of;

  // Maps a flow given on the raw edge list onto canonical edges. Flows on
  // flipped edges are negated; duplicates are summed.
  EdgeFlow remap_flow(const Vector& raw) const;
};

// Builds a FlowGraph from raw (u, v) pairs. Throws InvalidInput on a
// self-loop or an id outside [0, node_count).
BuildResult build_graph(const std::vector<std::pair<Index, Index>>& raw_edges, Index node_count,
                        std::optional<std::vector<Point2>> coords = std::nullopt);

struct Triangle {
  std::array<Index, 3> nodes;  // i < j < k
  std::array<Index, 3> edges;  // (i,j), (i,k), (j,k)
  std::array<int, 3> signs;    // +1, -1, +1

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

struct TriangleSet {
  std::vector<Triangle> triangles;

  Index size() const noexcept { return static_cast<Index>(triangles.size()); }
};

// grad: |E| x |V|, -1 at the tail and +1 at the head of every edge row.
SparseOperator incidence_matrix(const FlowGraph& g);

// All 3-cliques, each once, sorted lexicographically.
TriangleSet enumerate_triangles(const FlowGraph& g);

// curl: |T| x |E|. Row (i,j,k) reads g_ij - g_ik + g_jk.
SparseOperator curl_matrix(const FlowGraph& g, const TriangleSet& t);

// gradᵀ diag(w) grad. Weights default to one.
SparseOperator graph_laplacian(const FlowGraph& g, const std::optional<Vector>& edge_weights = std::nullopt);

// Component label per node, numbered 0..c-1 in order of lowest member.
std::vector<Index> connected_components(const FlowGraph& g);

inline Index component_count(const std::vector<Index>& labels) {
  Index c = 0;
  for (Index l : labels) c = std::max(c, l + 1);
  return c;
}

}  // namespace hodgeflow
