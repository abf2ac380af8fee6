#include "hodgeflow/hodge.hpp"

#include "hodgeflow/linalg.hpp"

#include <cmath>
#include <string>

namespace hodgeflow {

namespace {

Vector resolve_weights(const FlowGraph& g, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidInput("solver tolerance must be positive");
  if (!opts.edge_weights) return Vector::Ones(g.edge_count());
  const Vector& w = *opts.edge_weights;
  if (w.size() != g.edge_count()) throw InvalidInput("edge weight length mismatch");
  if (!(w.array() > 0.0).all() || !w.allFinite()) throw InvalidInput("edge weights must be positive");
  return w;
}

void check_flow(const FlowGraph& g, const EdgeFlow& f) {
  if (f.size() != g.edge_count())
    throw InvalidInput("flow length " + std::to_string(f.size()) + " does not match " +
                       std::to_string(g.edge_count()) + " edges");
  if (!f.allFinite()) throw InvalidInput("flow has non-finite entries");
}

// Subtracts the per-component mean.
void center_per_component(Vector& x, const std::vector<Index>& comp) {
  const Index c = component_count(comp);
  Vector sum = Vector::Zero(c);
  Vector cnt = Vector::Zero(c);
  for (Index i = 0; i < x.size(); ++i) {
    sum[comp[static_cast<std::size_t>(i)]] += x[i];
    cnt[comp[static_cast<std::size_t>(i)]] += 1.0;
  }
  for (Index i = 0; i < x.size(); ++i) {
    const Index k = comp[static_cast<std::size_t>(i)];
    x[i] -= sum[k] / cnt[k];
  }
}

int iteration_cap(const SolverOptions& opts, Index dim) {
  return opts.max_iter > 0 ? opts.max_iter : static_cast<int>(std::max<Index>(10 * dim, 10));
}

// Minimum-norm h of (curl W⁻¹ curlᵀ) h = curl f, returned as W⁻¹ curlᵀ h.
EdgeFlow curl_projection(const SparseOperator& curl, const EdgeFlow& f, const Vector& winv,
                         const SolverOptions& opts) {
  const Index nt = curl.rows();
  if (nt == 0) return EdgeFlow::Zero(f.size());
  const Vector rhs = curl * f;
  Vector h;
  if (opts.method == SolverMethod::dense_pseudoinverse && nt <= kDenseSolveLimit) {
    const Matrix c = Matrix(curl);
    const Matrix up = c * winv.asDiagonal() * c.transpose();
    h = pseudo_inverse_solve(up, rhs);
  } else {
    Vector diag = Vector::Zero(nt);
    for (Index r = 0; r < nt; ++r)
      for (SparseOperator::InnerIterator it(curl, r); it; ++it) diag[r] += winv[it.col()];
    const Vector inv_diag = diag.cwiseInverse();
    auto apply = [&](const Vector& v) -> Vector {
      const Vector edge = winv.cwiseProduct(curl.transpose() * v);
      return curl * edge;
    };
    h = conjugate_gradient(apply, rhs, inv_diag, opts.tol, iteration_cap(opts, nt)).x;
  }
  return winv.cwiseProduct(curl.transpose() * h);
}

double weighted_sq(const Vector& x, const Vector& w) { return x.cwiseProduct(x).dot(w); }

}  // namespace

NodeField divergence(const FlowGraph& g, const EdgeFlow& f) {
  check_flow(g, f);
  Vector d = Vector::Zero(g.node_count());
  for (Index e = 0; e < g.edge_count(); ++e) {
    d[g.edge(e).head] += f[e];
    d[g.edge(e).tail] -= f[e];
  }
  return {std::move(d), FieldKind::divergence};
}

NodeField solve_potential(const FlowGraph& g, const EdgeFlow& f, const SolverOptions& opts) {
  if (g.node_count() == 0) throw InvalidInput("empty graph");
  check_flow(g, f);
  const Vector w = resolve_weights(g, opts);
  const auto comp = connected_components(g);

  const SparseOperator grad = incidence_matrix(g);
  Vector rhs = grad.transpose() * w.cwiseProduct(f);
  center_per_component(rhs, comp);

  const SparseOperator lap = graph_laplacian(g, w);
  Vector p;
  if (opts.method == SolverMethod::dense_pseudoinverse && g.node_count() <= kDenseSolveLimit) {
    p = pseudo_inverse_solve(Matrix(lap), rhs);
  } else {
    auto apply = [&](const Vector& v) -> Vector { return lap * v; };
    p = conjugate_gradient(apply, rhs, jacobi_inverse_diagonal(lap), opts.tol,
                           iteration_cap(opts, g.node_count()))
            .x;
  }
  center_per_component(p, comp);
  return {std::move(p), FieldKind::potential};
}

HodgeComponents hodge_decompose(const FlowGraph& g, const EdgeFlow& f, const SolverOptions& opts) {
  HodgeComponents out;
  out.weights = resolve_weights(g, opts);
  out.potential = solve_potential(g, f, opts);
  out.gradient = incidence_matrix(g) * out.potential.values;

  const TriangleSet tri = enumerate_triangles(g);
  const SparseOperator curl = curl_matrix(g, tri);
  out.triangle_curl = curl * f;
  out.curl_adjoint = curl_projection(curl, f, out.weights.cwiseInverse(), opts);
  out.harmonic = f - out.gradient - out.curl_adjoint;
  if (f.squaredNorm() > 0.0) out.energies = component_energies(out);
  return out;
}

Index harmonic_dimension(const FlowGraph& g) {
  const TriangleSet tri = enumerate_triangles(g);
  const double cells = static_cast<double>(std::max(tri.size(), g.node_count())) *
                       static_cast<double>(g.edge_count());
  if (cells > 4e7)
    throw InvalidInput("graph too large for dense rank (" + std::to_string(g.edge_count()) + " edges, " +
                       std::to_string(tri.size()) + " triangles)");
  const Index rank_grad = numerical_rank(Matrix(incidence_matrix(g)));
  const Index rank_curl = numerical_rank(Matrix(curl_matrix(g, tri)));
  return g.edge_count() - rank_grad - rank_curl;
}

ComponentEnergies component_energies(const HodgeComponents& c) {
  const Vector w = c.weights.size() == c.gradient.size() ? c.weights : Vector::Ones(c.gradient.size());
  const double total = weighted_sq(c.gradient + c.curl_adjoint + c.harmonic, w);
  if (!(total > 0.0)) throw InvalidInput("undefined energies: zero flow");
  return {weighted_sq(c.gradient, w) / total, weighted_sq(c.curl_adjoint, w) / total,
          weighted_sq(c.harmonic, w) / total};
}

EdgeFlow net_flow(const Vector& fwd, const Vector& rev) {
  if (fwd.size() != rev.size()) throw InvalidInput("forward and reverse volume lengths differ");
  if ((fwd.array() < 0.0).any() || (rev.array() < 0.0).any()) throw InvalidInput("negative raw volume");
  return fwd - rev;
}

}  // namespace hodgeflow
