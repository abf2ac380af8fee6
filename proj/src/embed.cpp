#include "hodgeflow/embed.hpp"

#include "hodgeflow/hodge.hpp"

#include <array>
#include <cmath>

namespace hodgeflow {

namespace {

constexpr std::array<std::pair<FeatureSet, std::string_view>, 5> kFeatureNames = {{
    {FeatureSet::struct_only, "struct_only"},
    {FeatureSet::struct_mean, "struct_mean"},
    {FeatureSet::struct_mean_skew, "struct_mean_skew"},
    {FeatureSet::mean_only, "mean_only"},
    {FeatureSet::potential_only, "potential_only"},
}};

struct Block {
  Matrix cols;
  std::vector<std::string> names;
  bool structural = false;
};

bool uses_struct(FeatureSet f) {
  return f == FeatureSet::struct_only || f == FeatureSet::struct_mean || f == FeatureSet::struct_mean_skew;
}

}  // namespace

std::string_view to_string(FeatureSet f) {
  for (const auto& [k, v] : kFeatureNames)
    if (k == f) return v;
  return "unknown";
}

std::optional<FeatureSet> parse_feature_set(std::string_view name) {
  for (const auto& [k, v] : kFeatureNames)
    if (v == name) return k;
  return std::nullopt;
}

std::string feature_set_names() {
  std::string out;
  for (const auto& [k, v] : kFeatureNames) {
    if (!out.empty()) out += "|";
    out += v;
  }
  return out;
}

FlowFeatures mean_skew(const Vector& fwd, const Vector& rev) {
  if (fwd.size() != rev.size()) throw InvalidInput("forward and reverse volume lengths differ");
  if ((fwd.array() < 0.0).any() || (rev.array() < 0.0).any()) throw InvalidInput("negative volume");
  FlowFeatures out;
  out.m = 0.5 * (fwd + rev);
  out.s = fwd - rev;
  return out;
}

FlowFeatures node_flow_features(const FlowGraph& g, FlowFeatures features, const std::optional<Vector>& weights) {
  if (features.m.size() != g.edge_count() || features.s.size() != g.edge_count())
    throw InvalidInput("edge feature length does not match edge count");
  const Vector w = weights ? *weights : Vector::Ones(g.edge_count());
  if (w.size() != g.edge_count()) throw InvalidInput("weight length does not match edge count");

  features.z_mean = Vector::Zero(g.node_count());
  features.z_skew = Vector::Zero(g.node_count());
  for (Index e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.edge(e);
    features.z_mean[u] += w[e] * features.m[e];
    features.z_mean[v] += w[e] * features.m[e];
    features.z_skew[u] += w[e] * features.s[e];
    features.z_skew[v] -= w[e] * features.s[e];
  }
  for (Index i = 0; i < g.node_count(); ++i) {
    const double deg = static_cast<double>(g.degree(i));
    if (deg > 0.0) {
      features.z_mean[i] /= deg;
      features.z_skew[i] /= deg;
    }
  }
  return features;
}

EmbeddingMatrix flow_embedding(const FlowGraph& g, const Vector& fwd, const Vector& rev, Index k,
                               FeatureSet features, std::uint64_t seed) {
  (void)seed;  // the embedding itself is deterministic; the seed feeds k-means
  if (fwd.size() != g.edge_count() || rev.size() != g.edge_count())
    throw InvalidInput("volume length does not match edge count");
  const FlowFeatures ff = node_flow_features(g, mean_skew(fwd, rev));

  EmbeddingMatrix out;
  out.features = features;
  std::vector<Block> blocks;

  if (uses_struct(features)) {
    if (k < 1) throw InvalidInput("structural dimension k must be at least 1");
    if (!(ff.m.array() > 0.0).any()) throw InvalidInput("all-zero mean flow: no structure to embed");
    std::vector<Triplet> t;
    for (Index e = 0; e < g.edge_count(); ++e) {
      if (ff.m[e] == 0.0) continue;
      t.emplace_back(g.edge(e).tail, g.edge(e).head, ff.m[e]);
      t.emplace_back(g.edge(e).head, g.edge(e).tail, ff.m[e]);
    }
    SimilarityMatrix sim(g.node_count(), g.node_count());
    sim.setFromTriplets(t.begin(), t.end());
    const SpectralEmbedding emb = smallest_eigenpairs(similarity_laplacian(sim), k, true);
    Block b{emb.vectors, {}, true};
    for (Index j = 0; j < k; ++j) b.names.push_back("struct_" + std::to_string(j));
    blocks.push_back(std::move(b));
  }
  if (features == FeatureSet::struct_mean || features == FeatureSet::struct_mean_skew ||
      features == FeatureSet::mean_only)
    blocks.push_back({ff.z_mean, {"z_mean"}, false});
  if (features == FeatureSet::struct_mean_skew) blocks.push_back({ff.z_skew, {"z_skew"}, false});
  if (features == FeatureSet::potential_only) {
    const NodeField p = solve_potential(g, net_flow(fwd, rev));
    blocks.push_back({p.values, {"potential"}, false});
  }

  const Index n = g.node_count();
  if (blocks.size() == 1) {
    out.z = blocks.front().cols;
    out.columns = blocks.front().names;
    return out;
  }

  std::vector<Vector> cols;
  for (Block& b : blocks) {
    std::vector<Vector> kept;
    for (Index j = 0; j < b.cols.cols(); ++j) {
      Vector c = b.cols.col(j);
      c.array() -= c.mean();
      const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(n));
      const double scale = b.cols.col(j).cwiseAbs().maxCoeff();
      if (!(sd > 1e-12 * std::max(scale, 1e-300))) {
        out.warnings.push_back("dropped constant column " + b.names[static_cast<std::size_t>(j)]);
        continue;
      }
      kept.push_back(c / sd);
      out.columns.push_back(b.names[static_cast<std::size_t>(j)]);
    }
    const double block_scale = b.structural && !kept.empty() ? 1.0 / std::sqrt(static_cast<double>(kept.size())) : 1.0;
    for (Vector& c : kept) cols.push_back(c * block_scale);
  }
  if (cols.empty()) throw InvalidInput("every embedding column is constant");
  out.z.resize(n, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.z.col(static_cast<Index>(j)) = cols[j];
  return out;
}

ClusterAssignment cluster_flow_graph(const FlowGraph& g, const Vector& fwd, const Vector& rev, Index k_clusters,
                                     FeatureSet features, std::uint64_t seed, std::optional<Index> struct_dims) {
  const EmbeddingMatrix emb = flow_embedding(g, fwd, rev, struct_dims.value_or(k_clusters), features, seed);
  return kmeans(emb.z, k_clusters, seed);
}

}  // namespace hodgeflow
