#include "hodgeflow/embed.hpp"
#include "hodgeflow/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace hodgeflow;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("mean and skew") {
  FlowFeatures f = mean_skew(vec({10, 4, 0}), vec({4, 10, 0}));
  CHECK(f.m == vec({7, 7, 0}));
  CHECK(f.s == vec({6, -6, 0}));
  CHECK_THROWS_AS(mean_skew(vec({-1}), vec({0})), InvalidInput);
}

TEST_CASE("node flow features") {
  // star center 0 sends one unit to each leaf; node 4 is isolated
  const FlowGraph g = build_graph({{0, 1}, {0, 2}, {0, 3}}, 5).graph;
  const FlowFeatures f = node_flow_features(g, mean_skew(vec({1, 1, 1}), vec({0, 0, 0})));
  CHECK(f.z_mean[0] == doctest::Approx(0.5));
  CHECK(f.z_skew[0] == doctest::Approx(1.0));
  CHECK(f.z_skew[1] == doctest::Approx(-1.0));
  CHECK(f.z_mean[4] == 0.0);
  CHECK(f.z_skew[4] == 0.0);

  std::mt19937_64 rng(113);
  for (int t = 0; t < 10; ++t) {
    const FlowGraph h = oracle::random_connected(15, 0.2, rng);
    const Vector fwd = oracle::random_vector(h.edge_count(), rng).cwiseAbs();
    const Vector rev = oracle::random_vector(h.edge_count(), rng).cwiseAbs();
    const FlowFeatures ff = node_flow_features(h, mean_skew(fwd, rev));
    const Vector d = divergence(h, net_flow(fwd, rev)).values;
    for (Index v = 0; v < 15; ++v)
      CHECK(ff.z_skew[v] * static_cast<double>(h.degree(v)) == doctest::Approx(-d[v]).epsilon(1e-12));
  }
}

TEST_CASE("feature set names") {
  CHECK(parse_feature_set("struct_mean_skew") == FeatureSet::struct_mean_skew);
  CHECK_FALSE(parse_feature_set("nope").has_value());
  CHECK(to_string(FeatureSet::potential_only) == "potential_only");
  CHECK(feature_set_names() == "struct_only|struct_mean|struct_mean_skew|mean_only|potential_only");
}

TEST_CASE("flow embedding blocks") {
  std::mt19937_64 rng(127);
  const FlowGraph g = oracle::random_connected(30, 0.15, rng);
  const Vector fwd = oracle::random_vector(g.edge_count(), rng).cwiseAbs();
  const Vector rev = oracle::random_vector(g.edge_count(), rng).cwiseAbs();

  SUBCASE("struct_only is the spectral embedding of the m-weighted graph") {
    const EmbeddingMatrix e = flow_embedding(g, fwd, rev, 3, FeatureSet::struct_only, 0);
    const Vector m = 0.5 * (fwd + rev);
    Matrix w = Matrix::Zero(30, 30);
    for (Index k = 0; k < g.edge_count(); ++k) w(g.edge(k).tail, g.edge(k).head) = w(g.edge(k).head, g.edge(k).tail) = m[k];
    const SpectralEmbedding s = smallest_eigenpairs(similarity_laplacian(w.sparseView()), 3, true);
    CHECK(e.z.cols() == 3);
    CHECK(e.z == s.vectors);
  }
  SUBCASE("struct_mean_skew standardizes and scales") {
    const EmbeddingMatrix e = flow_embedding(g, fwd, rev, 3, FeatureSet::struct_mean_skew, 0);
    REQUIRE(e.z.cols() == 5);
    CHECK(e.columns.back() == "z_skew");
    for (Index j = 0; j < 5; ++j) CHECK(std::abs(e.z.col(j).mean()) <= 1e-12);
    double struct_var = 0.0;
    for (Index j = 0; j < 3; ++j) struct_var += e.z.col(j).squaredNorm() / 30.0;
    CHECK(struct_var == doctest::Approx(1.0));
    CHECK(e.z.col(3).squaredNorm() / 30.0 == doctest::Approx(1.0));
    CHECK(e.z.col(4).squaredNorm() / 30.0 == doctest::Approx(1.0));
  }
  SUBCASE("symmetric flows drop the skew column with a warning") {
    const EmbeddingMatrix e = flow_embedding(g, fwd, fwd, 2, FeatureSet::struct_mean_skew, 0);
    CHECK(e.z.cols() == 3);
    REQUIRE(e.warnings.size() == 1);
    CHECK(e.warnings[0].find("z_skew") != std::string::npos);
    const FlowFeatures ff = node_flow_features(g, mean_skew(fwd, fwd));
    CHECK(ff.z_skew.isZero(0.0));
  }
  SUBCASE("potential_only") {
    const EmbeddingMatrix e = flow_embedding(g, fwd, rev, 1, FeatureSet::potential_only, 0);
    CHECK(e.z.cols() == 1);
    CHECK((e.z.col(0) - solve_potential(g, net_flow(fwd, rev)).values).norm() == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(flow_embedding(g, fwd, rev, 30, FeatureSet::struct_only, 0), InvalidInput);
    CHECK_THROWS_AS(flow_embedding(g, fwd, rev, 0, FeatureSet::struct_only, 0), InvalidInput);
    const Vector zero = Vector::Zero(g.edge_count());
    CHECK_THROWS_AS(flow_embedding(g, zero, zero, 2, FeatureSet::struct_only, 0), InvalidInput);
  }
}

TEST_CASE("mean_only splits two grids by flow level") {
  SynthSpec spec;
  spec.rows = spec.cols = 3;
  const FlowGraph one = grid_network(spec);
  std::vector<std::pair<Index, Index>> raw;
  for (const auto& e : one.edges()) {
    raw.emplace_back(e.tail, e.head);
    raw.emplace_back(e.tail + 9, e.head + 9);
  }
  const FlowGraph g = build_graph(raw, 18).graph;
  Vector fwd(g.edge_count());
  for (Index e = 0; e < g.edge_count(); ++e) fwd[e] = g.edge(e).tail < 9 ? 5.0 : 50.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ClusterAssignment a = cluster_flow_graph(g, fwd, fwd, 2, FeatureSet::mean_only, seed);
    std::vector<Index> truth(18, 0);
    for (Index v = 9; v < 18; ++v) truth[static_cast<std::size_t>(v)] = 1;
    CHECK(oracle::same_partition(a.labels, truth));
  }
}

TEST_CASE("clustering is orientation invariant and deterministic") {
  SynthSpec spec;
  spec.rows = spec.cols = 8;
  const FlowGraph g = grid_network(spec);
  const auto labels = checkerboard_labels(8, 8);
  const DirectedVolumes v = planted_community_flows(g, labels, 10.0, 3);

  // Feed the same traffic through a raw edge list with every other edge reversed.
  std::vector<std::pair<Index, Index>> raw;
  Vector raw_fwd(g.edge_count()), raw_rev(g.edge_count());
  for (Index e = 0; e < g.edge_count(); ++e) {
    const bool flip = e % 2 == 1;
    raw.emplace_back(flip ? g.edge(e).head : g.edge(e).tail, flip ? g.edge(e).tail : g.edge(e).head);
    raw_fwd[e] = flip ? v.rev[e] : v.fwd[e];
    raw_rev[e] = flip ? v.fwd[e] : v.rev[e];
  }
  const BuildResult b = build_graph(raw, 64);
  Vector fwd(g.edge_count()), rev(g.edge_count());
  for (Index i = 0; i < g.edge_count(); ++i) {
    const Index e = b.edge_of[static_cast<std::size_t>(i)];
    fwd[e] = b.flipped[static_cast<std::size_t>(i)] ? raw_rev[i] : raw_fwd[i];
    rev[e] = b.flipped[static_cast<std::size_t>(i)] ? raw_fwd[i] : raw_rev[i];
  }
  const ClusterAssignment a = cluster_flow_graph(g, v.fwd, v.rev, 2, FeatureSet::struct_mean_skew, 9);
  const ClusterAssignment c = cluster_flow_graph(b.graph, fwd, rev, 2, FeatureSet::struct_mean_skew, 9);
  CHECK(a.labels == c.labels);
  CHECK(adjusted_rand_index(a.labels, labels) == doctest::Approx(1.0));
}
