#include "hodgeflow/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>

namespace hodgeflow {

Vector jacobi_inverse_diagonal(const SparseOperator& a) {
  Vector d = a.diagonal();
  for (Index i = 0; i < d.size(); ++i) d[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
  return d;
}

Vector pseudo_inverse_solve(const Matrix& a, const Vector& b, double rel_cutoff) {
  if (a.rows() == 0) return Vector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Vector& lam = es.eigenvalues();
  const double cutoff = rel_cutoff * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  Vector coeff = es.eigenvectors().transpose() * b;
  for (Index i = 0; i < coeff.size(); ++i) coeff[i] = lam[i] > cutoff ? coeff[i] / lam[i] : 0.0;
  return es.eigenvectors() * coeff;
}

Index numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  const double tol = static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon() * s[0];
  return static_cast<Index>((s.array() > tol).count());
}

}  // namespace hodgeflow
