#include "hodgeflow/synth.hpp"

#include "hodgeflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace hodgeflow {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

double rms(const Vector& v) { return v.size() ? std::sqrt(v.squaredNorm() / static_cast<double>(v.size())) : 0.0; }

Vector scaled_to_rms(Vector v, double target) {
  const double r = rms(v);
  return r > 0.0 ? Vector(v * (target / r)) : Vector(Vector::Zero(v.size()));
}

Vector gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace

std::string_view to_string(Phase p) { return p == Phase::morning ? "morning" : "evening"; }

OdSample er_od_graph(const SynthSpec& spec, Phase phase) {
  if (spec.n < 10) throw InvalidInput("er_od needs at least 10 nodes");
  if (!(spec.edge_prob > 0.0 && spec.edge_prob <= 1.0)) throw InvalidInput("edge probability must lie in (0, 1]");
  if (spec.hub_fraction < 0.0 || spec.hub_fraction > 1.0) throw InvalidInput("hub fraction must lie in [0, 1]");
  const double hub_p = spec.hub_edge_prob < 0.0 ? spec.edge_prob + 0.4 * (1.0 - spec.edge_prob) : spec.hub_edge_prob;
  if (hub_p > 1.0) throw InvalidInput("hub edge probability must not exceed 1");
  const Index n = spec.n;

  for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
    auto rng = stream(spec.seed, 1, attempt);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto hub_count = static_cast<Index>(std::llround(spec.hub_fraction * static_cast<double>(n)));
    std::vector<Index> hubs(order.begin(), order.begin() + hub_count);
    std::sort(hubs.begin(), hubs.end());
    std::vector<bool> is_hub(static_cast<std::size_t>(n), false);
    for (Index h : hubs) is_hub[static_cast<std::size_t>(h)] = true;

    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<Index, Index>> raw;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const bool touches_hub = is_hub[static_cast<std::size_t>(i)] || is_hub[static_cast<std::size_t>(j)];
        if (u(rng) < (touches_hub ? hub_p : spec.edge_prob)) raw.emplace_back(i, j);
      }
    FlowGraph g = build_graph(raw, n).graph;
    if (component_count(connected_components(g)) != 1) continue;

    auto vrng = stream(spec.seed, 2 + static_cast<std::uint64_t>(phase), attempt);
    std::poisson_distribution<long> base(spec.base_volume);
    std::poisson_distribution<long> boosted(spec.base_volume * spec.hub_weight_multiplier);
    OdSample out{std::move(g), Vector(), Vector(), std::move(hubs)};
    const Index m = out.graph.edge_count();
    out.fwd.resize(m);
    out.rev.resize(m);
    for (Index e = 0; e < m; ++e) {
      const bool tail_hub = is_hub[static_cast<std::size_t>(out.graph.edge(e).tail)];
      const bool head_hub = is_hub[static_cast<std::size_t>(out.graph.edge(e).head)];
      // Morning commuters head into hubs; evening they leave.
      bool boost_fwd = !tail_hub && head_hub;
      bool boost_rev = tail_hub && !head_hub;
      if (phase == Phase::evening) std::swap(boost_fwd, boost_rev);
      out.fwd[e] = static_cast<double>(boost_fwd ? boosted(vrng) : base(vrng));
      out.rev[e] = static_cast<double>(boost_rev ? boosted(vrng) : base(vrng));
    }
    return out;
  }
  throw InvalidInput("er_od graph still disconnected after 10 attempts");
}

FlowGraph grid_network(const SynthSpec& spec) {
  if (spec.rows < 3 || spec.cols < 3) throw InvalidInput("grid needs at least 3 rows and 3 columns");
  const Index n = spec.rows * spec.cols;
  std::vector<std::pair<Index, Index>> raw;
  std::vector<Point2> coords(static_cast<std::size_t>(n));
  for (Index r = 0; r < spec.rows; ++r)
    for (Index c = 0; c < spec.cols; ++c) {
      const Index v = r * spec.cols + c;
      coords[static_cast<std::size_t>(v)] = {static_cast<double>(c) * spec.grid_spacing,
                                             static_cast<double>(r) * spec.grid_spacing};
      if (c + 1 < spec.cols) raw.emplace_back(v, v + 1);
      if (r + 1 < spec.rows) raw.emplace_back(v, v + spec.cols);
    }
  return build_graph(raw, n, std::move(coords)).graph;
}

PlantedFlow planted_flow(const FlowGraph& g, const FlowStrengths& s, Phase phase, std::uint64_t seed) {
  if (s.gradient < 0.0 || s.curl < 0.0 || s.harmonic < 0.0 || s.noise < 0.0)
    throw InvalidInput("planted strengths must be nonnegative");
  const Index m = g.edge_count();
  PlantedFlow out;
  out.potential_true = {Vector::Zero(g.node_count()), FieldKind::potential};
  out.gradient = out.curl = out.harmonic = out.noise = EdgeFlow::Zero(m);

  if (s.gradient > 0.0) {
    auto prng = stream(seed, 10);
    const Index modes = std::min<Index>(s.smooth_modes, g.node_count() - component_count(connected_components(g)));
    if (modes < 1) throw InvalidInput("graph has no non-constant potential modes");
    const SpectralEmbedding low = smallest_eigenpairs(graph_laplacian(g), modes, true);
    Vector p = low.vectors * gaussian(prng, modes);
    const Vector grad = incidence_matrix(g) * p;
    const double r = rms(grad);
    if (r > 0.0) p *= s.gradient / r;
    if (phase == Phase::evening) p = -p;
    out.potential_true.values = p;
    out.gradient = incidence_matrix(g) * p;
  }

  auto nrng = stream(seed, 20, static_cast<std::uint64_t>(phase));
  if (s.curl > 0.0) {
    const TriangleSet tri = enumerate_triangles(g);
    if (tri.size() == 0) throw InvalidInput("curl strength > 0 on a graph without triangles");
    const SparseOperator curl = curl_matrix(g, tri);
    out.curl = scaled_to_rms(curl.transpose() * gaussian(nrng, tri.size()), s.curl);
  }
  if (s.harmonic > 0.0) {
    const Vector r = gaussian(nrng, m);
    SolverOptions opts;
    opts.tol = 1e-12;
    const Vector h = hodge_decompose(g, r, opts).harmonic;
    if (h.norm() <= 1e-9 * r.norm())
      throw InvalidInput("harmonic strength > 0 on a graph with harmonic dimension 0");
    out.harmonic = scaled_to_rms(h, s.harmonic);
  }
  if (s.noise > 0.0) out.noise = s.noise * gaussian(nrng, m);

  out.flow = out.gradient + out.curl + out.harmonic + out.noise;
  return out;
}

DirectedVolumes planted_community_flows(const FlowGraph& g, const std::vector<Index>& labels, double skew_delta,
                                        std::uint64_t seed, double base_volume) {
  if (static_cast<Index>(labels.size()) != g.node_count()) throw InvalidInput("label count does not match node count");
  if (skew_delta < 0.0) throw InvalidInput("skew delta must be nonnegative");
  if (std::all_of(labels.begin(), labels.end(), [&](Index l) { return l == labels.front(); }))
    throw InvalidInput("planted communities need at least two labels");

  auto rng = stream(seed, 30);
  std::poisson_distribution<long> base(base_volume);
  DirectedVolumes out{Vector(g.edge_count()), Vector(g.edge_count())};
  for (Index e = 0; e < g.edge_count(); ++e) {
    const double v = 0.5 * skew_delta + static_cast<double>(base(rng));
    const Index lt = labels[static_cast<std::size_t>(g.edge(e).tail)];
    const Index lh = labels[static_cast<std::size_t>(g.edge(e).head)];
    const double shift = lt < lh ? 0.5 * skew_delta : (lt > lh ? -0.5 * skew_delta : 0.0);
    out.fwd[e] = v + shift;
    out.rev[e] = v - shift;
  }
  return out;
}

DirectedVolumes volumes_from_net_flow(const EdgeFlow& f, double base_volume, std::uint64_t seed) {
  auto rng = stream(seed, 40);
  std::poisson_distribution<long> base(base_volume);
  DirectedVolumes out{Vector(f.size()), Vector(f.size())};
  for (Index e = 0; e < f.size(); ++e) {
    const double b = static_cast<double>(base(rng));
    out.fwd[e] = b + std::max(f[e], 0.0);
    out.rev[e] = b + std::max(-f[e], 0.0);
  }
  return out;
}

std::vector<Index> checkerboard_labels(Index rows, Index cols) {
  std::vector<Index> labels(static_cast<std::size_t>(rows * cols));
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) labels[static_cast<std::size_t>(r * cols + c)] = (r + c) % 2;
  return labels;
}

}  // namespace hodgeflow
