#include "hodgeflow/metrics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace hodgeflow {

double local_variance(const FlowGraph& g, const NodeField& x) {
  return local_variance(graph_laplacian(g), x.values);
}

double global_variance(const NodeField& x) { return global_variance(x.values); }

VarianceReport variance_report(const FlowGraph& g, const EdgeFlow& f, const SolverOptions& opts) {
  VarianceReport r;
  r.potential = solve_potential(g, f, opts);
  r.divergence = divergence(g, f);
  const Vector& p = r.potential.values;
  const Vector& d = r.divergence.values;

  const SparseOperator lap = graph_laplacian(g);
  r.local_p = local_variance(lap, p);
  r.local_d = local_variance(lap, d);
  r.global_p = global_variance(p);
  r.global_d = global_variance(d);

  if (g.node_count() > kSpectralReportLimit || opts.edge_weights || g.edge_count() == 0) return r;

  const Matrix grad = Matrix(incidence_matrix(g));
  Eigen::BDCSVD<Matrix> svd(grad, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Index keep = 0;
  while (keep < s.size() && s[keep] > 1e-8 * smax) ++keep;

  // Singular values come out descending; store ascending.
  r.lambda = s.head(keep).array().square().reverse();
  r.a = (svd.matrixU().leftCols(keep).transpose() * f).reverse();

  const auto lam = r.lambda.array();
  const auto a2 = r.a.array().square();
  r.spectral_global_p = (a2 / lam).sum();
  r.spectral_global_d = (lam * a2).sum();
  r.spectral_local_p = a2.sum();
  r.spectral_local_d = (lam * lam * a2).sum();
  return r;
}

double variance_report_discrepancy(const VarianceReport& r) {
  if (!r.spectral_local_p || r.lambda.size() == 0) return 0.0;
  const double lmin = r.lambda.minCoeff();
  const double lmax = r.lambda.maxCoeff();
  const double fscale = r.a.squaredNorm();
  const double floor = 1e-12 * std::max(fscale, 1e-300) * std::max({1.0, lmax * lmax, 1.0 / lmin});
  auto rel = [&](double direct, double spectral) {
    const double den = std::max({std::abs(direct), std::abs(spectral), floor});
    return std::abs(direct - spectral) / den;
  };
  return std::max({rel(r.local_p, *r.spectral_local_p), rel(r.local_d, *r.spectral_local_d),
                   rel(r.global_p, *r.spectral_global_p), rel(r.global_d, *r.spectral_global_d)});
}

double assortativity(const FlowGraph& g, const Vector& x) {
  if (x.size() != g.node_count()) throw InvalidInput("assortativity: field length does not match node count");
  if (g.edge_count() < 2) throw InvalidInput("assortativity needs at least two edges");
  const Index m = g.edge_count();
  Vector a(2 * m), b(2 * m);
  for (Index e = 0; e < m; ++e) {
    const auto [u, v] = g.edge(e);
    a[2 * e] = x[u];
    b[2 * e] = x[v];
    a[2 * e + 1] = x[v];
    b[2 * e + 1] = x[u];
  }
  return pearson(a, b);
}

PiecewiseFit piecewise_fit(const Vector& p, const Vector& d) {
  if (p.size() != d.size()) throw InvalidInput("piecewise_fit: length mismatch");
  const Index n = p.size();
  Index neg = 0, pos = 0;
  for (Index i = 0; i < n; ++i) {
    if (d[i] < 0.0) ++neg;
    else if (d[i] > 0.0) ++pos;
  }
  if (neg == 0) throw InvalidInput("piecewise_fit: negative-divergence branch is empty");
  if (pos == 0) throw InvalidInput("piecewise_fit: nonnegative-divergence branch is empty");

  Matrix x(n, 3);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = d[i] < 0.0 ? d[i] : 0.0;
    x(i, 2) = d[i] >= 0.0 ? d[i] : 0.0;
  }
  const Vector c = x.colPivHouseholderQr().solve(p);
  PiecewiseFit fit{c[1], c[2], c[0], 0.0};
  const double ss_res = (x * c - p).squaredNorm();
  const double ss_tot = (p.array() - p.mean()).square().sum();
  fit.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

double rank_correlation(const Vector& p, const Vector& d) {
  if (p.size() != d.size()) throw InvalidInput("rank_correlation: length mismatch");
  if (p.size() < 3) throw InvalidInput("rank_correlation needs at least three items");
  return pearson(average_ranks(p), average_ranks(d));
}

}  // namespace hodgeflow
