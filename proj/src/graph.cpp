#include "hodgeflow/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace hodgeflow {

struct GraphBuilder {
  static FlowGraph make(Index n, std::vector<Edge> edges, std::optional<std::vector<Point2>> coords) {
    FlowGraph g;
    g.node_count_ = n;
    g.edges_ = std::move(edges);
    g.adjacency_.assign(static_cast<std::size_t>(n), {});
    for (const Edge& e : g.edges_) {
      g.adjacency_[static_cast<std::size_t>(e.tail)].push_back(e.head);
      g.adjacency_[static_cast<std::size_t>(e.head)].push_back(e.tail);
    }
    for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());
    g.coords_ = std::move(coords);
    return g;
  }
};

const std::vector<Point2>& FlowGraph::coords() const {
  if (!coords_) throw InvalidInput("graph has no node coordinates");
  return *coords_;
}

Index FlowGraph::find_edge(Index u, Index v) const {
  const Edge key{std::min(u, v), std::max(u, v)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return -1;
  return static_cast<Index>(it - edges_.begin());
}

EdgeFlow BuildResult::remap_flow(const Vector& raw) const {
  if (raw.size() != static_cast<Index>(edge_of.size()))
    throw InvalidInput("raw flow length " + std::to_string(raw.size()) + " does not match " +
                       std::to_string(edge_of.size()) + " raw edges");
  EdgeFlow out = EdgeFlow::Zero(graph.edge_count());
  for (std::size_t i = 0; i < edge_of.size(); ++i)
    out[edge_of[i]] += flipped[i] ? -raw[static_cast<Index>(i)] : raw[static_cast<Index>(i)];
  return out;
}

BuildResult build_graph(const std::vector<std::pair<Index, Index>>& raw_edges, Index node_count,
                        std::optional<std::vector<Point2>> coords) {
  if (node_count < 0) throw InvalidInput("negative node count");
  if (coords && static_cast<Index>(coords->size()) != node_count)
    throw InvalidInput("coordinate count does not match node count");

  BuildResult out;
  out.flipped.reserve(raw_edges.size());
  std::vector<Edge> canon;
  canon.reserve(raw_edges.size());
  for (const auto& [u, v] : raw_edges) {
    const std::string pair = "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
    if (u == v) throw InvalidInput("self-loop " + pair);
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw InvalidInput("node id out of range in edge " + pair);
    out.flipped.push_back(u > v);
    canon.push_back({std::min(u, v), std::max(u, v)});
  }

  std::vector<Edge> unique = canon;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  out.edge_of.reserve(canon.size());
  for (const Edge& e : canon)
    out.edge_of.push_back(static_cast<Index>(std::lower_bound(unique.begin(), unique.end(), e) - unique.begin()));

  out.graph = GraphBuilder::make(node_count, std::move(unique), std::move(coords));
  return out;
}

SparseOperator incidence_matrix(const FlowGraph& g) {
  std::vector<Triplet> t;
  t.reserve(2 * static_cast<std::size_t>(g.edge_count()));
  for (Index e = 0; e < g.edge_count(); ++e) {
    t.emplace_back(e, g.edge(e).tail, -1.0);
    t.emplace_back(e, g.edge(e).head, 1.0);
  }
  SparseOperator grad(g.edge_count(), g.node_count());
  grad.setFromTriplets(t.begin(), t.end());
  return grad;
}

TriangleSet enumerate_triangles(const FlowGraph& g) {
  // For each edge (i,j), i<j, intersect the higher neighbors of i and j.
  TriangleSet out;
  std::vector<Index> common;
  for (Index e_ij = 0; e_ij < g.edge_count(); ++e_ij) {
    const auto [i, j] = g.edge(e_ij);
    const auto& ni = g.neighbors(i);
    const auto& nj = g.neighbors(j);
    auto hi = std::upper_bound(ni.begin(), ni.end(), j);
    auto hj = std::upper_bound(nj.begin(), nj.end(), j);
    common.clear();
    std::set_intersection(hi, ni.end(), hj, nj.end(), std::back_inserter(common));
    for (Index k : common) {
      out.triangles.push_back(Triangle{{i, j, k}, {e_ij, g.find_edge(i, k), g.find_edge(j, k)}, {1, -1, 1}});
    }
  }
  // Edges are sorted by (i, j) and k ascends within each edge, so the list is
  // already lexicographic.
  return out;
}

SparseOperator curl_matrix(const FlowGraph& g, const TriangleSet& ts) {
  std::vector<Triplet> t;
  t.reserve(3 * ts.triangles.size());
  for (Index r = 0; r < ts.size(); ++r) {
    const Triangle& tri = ts.triangles[static_cast<std::size_t>(r)];
    const auto [i, j, k] = tri.nodes;
    const std::array<Index, 3> expect = {g.find_edge(i, j), g.find_edge(i, k), g.find_edge(j, k)};
    for (int s = 0; s < 3; ++s) {
      if (expect[s] < 0 || expect[s] != tri.edges[s])
        throw InvalidInput("triangle (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                           std::to_string(k) + ") references a missing edge");
      t.emplace_back(r, tri.edges[s], static_cast<double>(tri.signs[s]));
    }
  }
  SparseOperator curl(ts.size(), g.edge_count());
  curl.setFromTriplets(t.begin(), t.end());
  return curl;
}

SparseOperator graph_laplacian(const FlowGraph& g, const std::optional<Vector>& edge_weights) {
  if (edge_weights) {
    if (edge_weights->size() != g.edge_count()) throw InvalidInput("edge weight length mismatch");
    if ((edge_weights->array() < 0.0).any()) throw InvalidInput("negative edge weight");
  }
  std::vector<Triplet> t;
  t.reserve(4 * static_cast<std::size_t>(g.edge_count()));
  for (Index e = 0; e < g.edge_count(); ++e) {
    const double w = edge_weights ? (*edge_weights)[e] : 1.0;
    const auto [u, v] = g.edge(e);
    t.emplace_back(u, u, w);
    t.emplace_back(v, v, w);
    t.emplace_back(u, v, -w);
    t.emplace_back(v, u, -w);
  }
  SparseOperator lap(g.node_count(), g.node_count());
  lap.setFromTriplets(t.begin(), t.end());
  return lap;
}

std::vector<Index> connected_components(const FlowGraph& g) {
  std::vector<Index> label(static_cast<std::size_t>(g.node_count()), -1);
  std::vector<Index> stack;
  Index next = 0;
  for (Index s = 0; s < g.node_count(); ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    label[static_cast<std::size_t>(s)] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index w : g.neighbors(v)) {
        if (label[static_cast<std::size_t>(w)] < 0) {
          label[static_cast<std::size_t>(w)] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace hodgeflow
