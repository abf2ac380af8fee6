#pragma once

#include "hodgeflow/graph.hpp"
#include "hodgeflow/types.hpp"

#include <cstdint>
#include <vector>

namespace hodgeflow {

enum class CutVariant { ratio_cut, normalized_cut };

// Symmetric, nonnegative, zero-diagonal node similarity.
using SimilarityMatrix = SparseOperator;

struct SpectralEmbedding {
  Vector eigenvalues;  // ascending
  Matrix vectors;      // |V| x k, row i embeds node i
  CutVariant variant = CutVariant::ratio_cut;
};

struct ClusterAssignment {
  std::vector<Index> labels;
  Index k = 0;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> inertia_trace;  // objective after each assignment step
};

struct EigenOptions {
  double tol = 1e-10;        // per-pair residual bound relative to ‖L‖
  Index dense_limit = 3000;  // above this, shift-invert subspace iteration
  double null_threshold = 1e-8;
};

struct KMeansOptions {
  int max_iter = 300;
  int n_init = 10;  // seeded restarts; the lowest inertia wins
};

// (fwd + rev) / 2 per edge.
Vector symmetrize_mean(const Vector& fwd, const Vector& rev);

// Median of the nonzero entries of `values`; 1 if there are none.
double median_nonzero(const Vector& values);

// s_e = 1 − exp(−m_e² / 2σ²) on every edge of g: increasing in volume,
// zero at zero volume.
SimilarityMatrix gaussian_similarity(const FlowGraph& g, const Vector& volumes, double sigma);

// α·s_flow + (1 − α)·exp(−dist² / 2σ_d²). The distance term covers every node
// pair whose kernel value exceeds 1e-12.
SimilarityMatrix blend_distance(const SimilarityMatrix& s_flow, const std::vector<Point2>& coords,
                                double sigma_d, double alpha);

// D − S.
SparseOperator similarity_laplacian(const SimilarityMatrix& s);

// k smallest eigenpairs of a symmetric PSD operator. With skip_null,
// eigenvalues below opts.null_threshold are dropped first. Each column gets
// its largest-magnitude entry positive.
SpectralEmbedding smallest_eigenpairs(const SparseOperator& lap, Index k, bool skip_null,
                                      const EigenOptions& opts = {});

// Laplacian eigenmap of a similarity matrix. normalized_cut solves on
// D^{-1/2} L D^{-1/2} and returns F = D^{-1/2} F̃.
SpectralEmbedding spectral_embedding(const SimilarityMatrix& s, Index k, CutVariant variant, bool skip_null,
                                     const EigenOptions& opts = {});

// k-means on the k smallest eigenvectors (null space included).
ClusterAssignment spectral_cluster(const SimilarityMatrix& s, Index k, CutVariant variant, std::uint64_t seed);

// k-means++ seeding followed by Lloyd iterations.
ClusterAssignment kmeans(const Matrix& points, Index k, std::uint64_t seed, const KMeansOptions& opts = {});

double ratio_cut(const SimilarityMatrix& s, const std::vector<Index>& labels);
double normalized_cut(const SimilarityMatrix& s, const std::vector<Index>& labels);

double adjusted_rand_index(const std::vector<Index>& a, const std::vector<Index>& b);

// Mean silhouette coefficient; 0 when there is a single cluster.
double silhouette(const Matrix& points, const std::vector<Index>& labels);

}  // namespace hodgeflow
