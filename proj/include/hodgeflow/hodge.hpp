#pragma once

#include "hodgeflow/graph.hpp"
#include "hodgeflow/types.hpp"

#include <optional>

namespace hodgeflow {

enum class FieldKind { potential, divergence };

// Scalar per node. Potentials are mean-zero per connected component;
// divergences sum to zero.
struct NodeField {
  Vector values;
  FieldKind kind = FieldKind::potential;
};

enum class SolverMethod { dense_pseudoinverse, conjugate_gradient };

// Largest node (or triangle) count routed to the dense pseudo-inverse; larger
// systems fall back to conjugate gradient.
inline constexpr Index kDenseSolveLimit = 2000;

struct SolverOptions {
  SolverMethod method = SolverMethod::conjugate_gradient;
  double tol = 1e-10;          // relative residual
  int max_iter = 0;            // 0 means 10 × system dimension
  std::optional<Vector> edge_weights;  // W of the weighted least squares; identity if unset
};

struct ComponentEnergies {
  double gradient = 0.0;
  double curl = 0.0;
  double harmonic = 0.0;
};

// f = gradient + curl_adjoint + harmonic, pairwise orthogonal in the
// W-weighted inner product.
struct HodgeComponents {
  EdgeFlow gradient;
  EdgeFlow curl_adjoint;
  EdgeFlow harmonic;
  NodeField potential;
  Vector triangle_curl;  // curl·f, one value per triangle
  ComponentEnergies energies;
  Vector weights;        // edge weights used (all ones for identity)
};

// d = gradᵀ f: net inflow per node.
NodeField divergence(const FlowGraph& g, const EdgeFlow& f);

// Minimum-norm potential of min_r ‖f − grad r‖²_W, mean-zero on every
// connected component.
NodeField solve_potential(const FlowGraph& g, const EdgeFlow& f, const SolverOptions& opts = {});

HodgeComponents hodge_decompose(const FlowGraph& g, const EdgeFlow& f, const SolverOptions& opts = {});

// dim ker(Helmholtzian) = |E| − rank(grad) − rank(curl), by dense rank.
Index harmonic_dimension(const FlowGraph& g);

// Squared W-norm of each component over that of their sum.
ComponentEnergies component_energies(const HodgeComponents& c);

// Net flow fwd − rev along the canonical orientation. Zero entries are kept.
EdgeFlow net_flow(const Vector& fwd, const Vector& rev);

}  // namespace hodgeflow
