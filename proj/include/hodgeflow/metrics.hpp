#pragma once

#include "hodgeflow/graph.hpp"
#include "hodgeflow/hodge.hpp"
#include "hodgeflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace hodgeflow {

// xᵀ L x = ½ Σ_{i∼j} w_ij (x_i − x_j)².
template <typename Derived>
typename Derived::Scalar local_variance(const SparseX<typename Derived::Scalar>& lap,
                                        const Eigen::MatrixBase<Derived>& x) {
  if (lap.rows() != x.size() || lap.cols() != x.size()) throw InvalidInput("local_variance: dimension mismatch");
  return x.dot(lap * x);
}

// xᵀ (I − 11ᵀ/n) x = Σ (x_i − mean)².
template <typename Derived>
typename Derived::Scalar global_variance(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) throw InvalidInput("global_variance: empty field");
  return (x.array() - x.mean()).square().sum();
}

// Pearson correlation. Throws on a constant input.
template <typename DA, typename DB>
typename DA::Scalar pearson(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  if (a.size() != b.size() || a.size() < 2) throw InvalidInput("pearson: need two equal-length samples");
  const auto ca = (a.array() - a.mean()).eval();
  const auto cb = (b.array() - b.mean()).eval();
  const Scalar den = std::sqrt((ca * ca).sum() * (cb * cb).sum());
  if (!(den > 0)) throw InvalidInput("undefined correlation: constant input");
  return (ca * cb).sum() / den;
}

// Average ranks (1-based), ties share the mean of their positions.
template <typename Derived>
VectorX<typename Derived::Scalar> average_ranks(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return x[i] < x[j]; });
  VectorX<Scalar> r(n);
  for (Index lo = 0; lo < n;) {
    Index hi = lo;
    while (hi + 1 < n && x[order[static_cast<std::size_t>(hi + 1)]] == x[order[static_cast<std::size_t>(lo)]]) ++hi;
    const Scalar avg = Scalar(lo + hi) / Scalar(2) + Scalar(1);
    for (Index i = lo; i <= hi; ++i) r[order[static_cast<std::size_t>(i)]] = avg;
    lo = hi + 1;
  }
  return r;
}

struct VarianceReport {
  double local_p = 0.0;
  double local_d = 0.0;
  double global_p = 0.0;
  double global_d = 0.0;
  // Weighted sums of squares from the incidence SVD; unset above the dense limit.
  std::optional<double> spectral_local_p;
  std::optional<double> spectral_local_d;
  std::optional<double> spectral_global_p;
  std::optional<double> spectral_global_d;
  Vector lambda;  // nonzero Laplacian eigenvalues (squared singular values), ascending
  Vector a;       // Uᵀf over the matching left singular vectors
  NodeField potential;
  NodeField divergence;
};

// Largest node count for which the spectral side of the report is computed.
inline constexpr Index kSpectralReportLimit = 500;

struct PiecewiseFit {
  double slope_neg = 0.0;
  double slope_pos = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

double local_variance(const FlowGraph& g, const NodeField& x);
double global_variance(const NodeField& x);

VarianceReport variance_report(const FlowGraph& g, const EdgeFlow& f, const SolverOptions& opts = {});

// Relative disagreement between the direct and spectral values (0 when the
// spectral side was skipped).
double variance_report_discrepancy(const VarianceReport& r);

// Pearson correlation of endpoint values over the symmetrized edge list.
double assortativity(const FlowGraph& g, const Vector& x);

// p ≈ c + slope_neg·d on d < 0 and c + slope_pos·d on d ≥ 0.
PiecewiseFit piecewise_fit(const Vector& p, const Vector& d);

// Spearman rho with average ranks for ties.
double rank_correlation(const Vector& p, const Vector& d);

}  // namespace hodgeflow
