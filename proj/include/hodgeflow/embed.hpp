#pragma once

#include "hodgeflow/graph.hpp"
#include "hodgeflow/spectral.hpp"
#include "hodgeflow/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hodgeflow {

enum class FeatureSet { struct_only, struct_mean, struct_mean_skew, mean_only, potential_only };

std::string_view to_string(FeatureSet f);
std::optional<FeatureSet> parse_feature_set(std::string_view name);
// "struct_only|struct_mean|..." for error messages.
std::string feature_set_names();

struct FlowFeatures {
  Vector m;       // per edge, (x_ij + x_ji) / 2
  Vector s;       // per edge, x_ij − x_ji along the canonical orientation
  Vector z_mean;  // per node, empty until node_flow_features runs
  Vector z_skew;
};

struct EmbeddingMatrix {
  Matrix z;  // |V| rows
  FeatureSet features = FeatureSet::struct_only;
  std::vector<std::string> columns;
  std::vector<std::string> warnings;
};

// Edge part of FlowFeatures.
FlowFeatures mean_skew(const Vector& fwd, const Vector& rev);

// Node part: z_mean(i) = Σ_j w_ij m_ij / deg_i and z_skew(i) = Σ_j w_ij s_ij / deg_i
// with s taken as flow out of i. Isolated nodes get zeros.
FlowFeatures node_flow_features(const FlowGraph& g, FlowFeatures features,
                                const std::optional<Vector>& weights = std::nullopt);

// Concatenates the blocks selected by `features`. When more than one block is
// used, each column is z-scored and the structural block is further scaled to
// unit total variance; constant columns are dropped with a warning.
EmbeddingMatrix flow_embedding(const FlowGraph& g, const Vector& fwd, const Vector& rev, Index k,
                               FeatureSet features, std::uint64_t seed);

// k-means on the rows of flow_embedding. `struct_dims` defaults to k_clusters.
ClusterAssignment cluster_flow_graph(const FlowGraph& g, const Vector& fwd, const Vector& rev, Index k_clusters,
                                     FeatureSet features, std::uint64_t seed,
                                     std::optional<Index> struct_dims = std::nullopt);

}  // namespace hodgeflow
