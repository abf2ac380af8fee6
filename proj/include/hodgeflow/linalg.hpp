#pragma once

#include "hodgeflow/types.hpp"

#include <cmath>
#include <string>

namespace hodgeflow {

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradient for a symmetric positive
// semidefinite operator. `apply(v)` must return A·v. The right-hand side is
// expected to lie in the range of A; starting from zero the iterates stay
// there, so a singular A is fine.
//
// Throws SolverError carrying the last relative residual if ‖b − Ax‖ / ‖b‖
// does not drop below `tol` within `max_iter` iterations.
template <typename Apply>
CgResult conjugate_gradient(Apply&& apply, const Vector& b, const Vector& inv_diag, double tol,
                            int max_iter) {
  CgResult out;
  out.x = Vector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return out;

  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  double res = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector ap = apply(p);
    const double pap = p.dot(ap);
    if (pap <= 0.0) break;  // breakdown: p in the null space
    const double alpha = rz / pap;
    out.x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    res = r.norm() / bnorm;
    out.iterations = it + 1;
    if (res <= tol) {
      out.relative_residual = res;
      return out;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  // Recompute the true residual before giving up; the recursive one drifts.
  res = (b - apply(out.x)).norm() / bnorm;
  out.relative_residual = res;
  if (res <= tol) return out;
  throw SolverError("conjugate gradient did not converge in " + std::to_string(max_iter) +
                        " iterations (relative residual " + std::to_string(res) + ")",
                    res, out.iterations);
}

// Inverse of the diagonal, with 1 where the diagonal vanishes.
Vector jacobi_inverse_diagonal(const SparseOperator& a);

// Minimum-norm solution of A x = b for symmetric PSD A via its
// eigendecomposition. Eigenvalues below `rel_cutoff`·λ_max count as zero.
Vector pseudo_inverse_solve(const Matrix& a, const Vector& b, double rel_cutoff = 1e-10);

// Numerical rank from singular values (threshold max(m,n)·ε·σ_max).
Index numerical_rank(const Matrix& a);

}  // namespace hodgeflow
