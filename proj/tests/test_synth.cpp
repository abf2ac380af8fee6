#include "hodgeflow/embed.hpp"
#include "hodgeflow/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace hodgeflow;

TEST_CASE("er_od generator statistics") {
  SynthSpec spec;
  spec.kind = SynthKind::er_od;
  spec.n = 300;
  spec.edge_prob = 0.5;
  spec.seed = 7;
  const OdSample od = er_od_graph(spec);
  const double n = 300.0;
  const double hubs = static_cast<double>(od.hubs.size());
  CHECK(hubs == 15.0);

  // Binomial expectation: pairs touching a hub use the raised probability.
  const double hub_p = 0.5 + 0.4 * 0.5;
  const double plain_pairs = (n - hubs) * (n - hubs - 1) / 2.0;
  const double all_pairs = n * (n - 1) / 2.0;
  const double expected_edges = 0.5 * plain_pairs + hub_p * (all_pairs - plain_pairs);
  const double edges = static_cast<double>(od.graph.edge_count());
  CHECK(std::abs(edges / expected_edges - 1.0) <= 0.05);
  const double mean_degree = 2.0 * edges / n;
  CHECK(std::abs(mean_degree / 150.0 - 1.0) <= 0.05);
  CHECK(component_count(connected_components(od.graph)) == 1);

  // Hubs sit in the top decile of weighted in-volume in the morning.
  Vector in_volume = Vector::Zero(300);
  for (Index e = 0; e < od.graph.edge_count(); ++e) {
    in_volume[od.graph.edge(e).head] += od.fwd[e];
    in_volume[od.graph.edge(e).tail] += od.rev[e];
  }
  std::vector<double> sorted(in_volume.data(), in_volume.data() + 300);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double decile = sorted[29];
  for (Index h : od.hubs) CHECK(in_volume[h] >= decile);

  CHECK((od.fwd.array() >= 0.0).all());
  CHECK((od.fwd.array() == od.fwd.array().round()).all());

  const OdSample again = er_od_graph(spec);
  CHECK(again.graph == od.graph);
  CHECK(again.fwd == od.fwd);
  CHECK(again.rev == od.rev);

  // Same graph in the evening, boosted direction swapped.
  const OdSample pm = er_od_graph(spec, Phase::evening);
  CHECK(pm.graph == od.graph);
  CHECK(pm.hubs == od.hubs);
  Vector out_volume = Vector::Zero(300);
  for (Index e = 0; e < pm.graph.edge_count(); ++e) {
    out_volume[pm.graph.edge(e).tail] += pm.fwd[e];
    out_volume[pm.graph.edge(e).head] += pm.rev[e];
  }
  for (Index h : pm.hubs) CHECK(out_volume[h] > in_volume.mean());

  SynthSpec small = spec;
  small.n = 9;
  CHECK_THROWS_AS(er_od_graph(small), InvalidInput);
  small = spec;
  small.edge_prob = 0.0;
  CHECK_THROWS_AS(er_od_graph(small), InvalidInput);
}

TEST_CASE("grid network") {
  SynthSpec spec;
  spec.rows = spec.cols = 3;
  const FlowGraph g = grid_network(spec);
  CHECK(g.node_count() == 9);
  CHECK(g.edge_count() == 12);
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(4) == 4);
  CHECK(component_count(connected_components(g)) == 1);
  CHECK(g.coords()[5] == Point2{200.0, 100.0});
  spec.rows = 2;
  CHECK_THROWS_AS(grid_network(spec), InvalidInput);
}

TEST_CASE("planted flow") {
  SynthSpec spec;
  spec.rows = spec.cols = 10;
  const FlowGraph grid = grid_network(spec);

  SUBCASE("pure gradient") {
    const PlantedFlow pf = planted_flow(grid, FlowStrengths{}, Phase::morning, 1);
    const HodgeComponents c = hodge_decompose(grid, pf.flow);
    CHECK(c.energies.gradient == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((c.potential.values - pf.potential_true.values).norm() <= 1e-6 * pf.potential_true.values.norm());
  }
  SUBCASE("evening negates the recovered potential") {
    FlowStrengths s;
    const PlantedFlow am = planted_flow(grid, s, Phase::morning, 2);
    const PlantedFlow pm = planted_flow(grid, s, Phase::evening, 2);
    CHECK(pm.potential_true.values == -am.potential_true.values);
    const Vector pa = solve_potential(grid, am.flow).values;
    const Vector pp = solve_potential(grid, pm.flow).values;
    CHECK((pa + pp).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("parts live in their subspaces") {
    std::mt19937_64 rng(131);
    const FlowGraph g = oracle::random_connected(14, 0.25, rng);
    REQUIRE(harmonic_dimension(g) > 0);
    FlowStrengths s;
    s.curl = 1.0;
    s.harmonic = 1.0;
    s.noise = 0.1;
    const PlantedFlow pf = planted_flow(g, s, Phase::morning, 3);
    const Matrix pg = oracle::projector(oracle::dense_grad(g));
    const Matrix pc = oracle::projector(oracle::dense_curl(g).transpose());
    CHECK((pg * pf.curl).squaredNorm() <= 1e-8 * pf.curl.squaredNorm());
    CHECK((pc * pf.gradient).squaredNorm() <= 1e-8 * pf.gradient.squaredNorm());
    CHECK((pg * pf.harmonic).squaredNorm() <= 1e-8 * pf.harmonic.squaredNorm());
    CHECK((pc * pf.harmonic).squaredNorm() <= 1e-8 * pf.harmonic.squaredNorm());
    CHECK((pf.gradient + pf.curl + pf.harmonic + pf.noise - pf.flow).norm() <= 1e-12);
    const PlantedFlow again = planted_flow(g, s, Phase::morning, 3);
    CHECK(again.flow == pf.flow);
  }
  SUBCASE("errors") {
    FlowStrengths h;
    h.harmonic = 1.0;
    CHECK_THROWS_AS(planted_flow(oracle::triangle(), h, Phase::morning, 0), InvalidInput);
    FlowStrengths c;
    c.curl = 1.0;
    CHECK_THROWS_AS(planted_flow(grid, c, Phase::morning, 0), InvalidInput);
    FlowStrengths neg;
    neg.noise = -1.0;
    CHECK_THROWS_AS(planted_flow(grid, neg, Phase::morning, 0), InvalidInput);
  }
}

TEST_CASE("planted community flows") {
  SynthSpec spec;
  spec.rows = spec.cols = 6;
  const FlowGraph g = grid_network(spec);
  const auto labels = checkerboard_labels(6, 6);

  const DirectedVolumes flat = planted_community_flows(g, labels, 0.0, 4);
  CHECK(node_flow_features(g, mean_skew(flat.fwd, flat.rev)).z_skew.isZero(0.0));

  const DirectedVolumes v = planted_community_flows(g, labels, 10.0, 4);
  const FlowFeatures f = node_flow_features(g, mean_skew(v.fwd, v.rev));
  for (Index i = 0; i < g.node_count(); ++i) {
    // every lattice edge crosses the checkerboard, so the skew is exactly ±δ
    CHECK(f.z_skew[i] == doctest::Approx(labels[static_cast<std::size_t>(i)] == 0 ? 10.0 : -10.0));
  }
  CHECK((v.fwd.array() >= 0.0).all());
  CHECK((v.rev.array() >= 0.0).all());
  const DirectedVolumes again = planted_community_flows(g, labels, 10.0, 4);
  CHECK(again.fwd == v.fwd);
  CHECK_THROWS_AS(planted_community_flows(g, std::vector<Index>(36, 0), 10.0, 4), InvalidInput);
}

TEST_CASE("volumes from net flow") {
  std::mt19937_64 rng(137);
  const Vector f = oracle::random_vector(50, rng);
  const DirectedVolumes v = volumes_from_net_flow(f, 10.0, 5);
  CHECK((v.fwd - v.rev - f).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((v.fwd.array() >= 0.0).all());
  CHECK((v.rev.array() >= 0.0).all());
}
