#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hodgeflow {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using SparseX = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// Row-major sparse operator. Boundary operators, Laplacians and similarity
// matrices all use this type; transpose and products come from Eigen.
using SparseOperator = SparseX<double>;
using Triplet = Eigen::Triplet<double>;

// Real value per oriented edge; the sign is taken along the stored
// (tail < head) orientation.
using EdgeFlow = Vector;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad ids, mismatched lengths, invalid parameters.
class InvalidInput : public Error {
public:
  using Error::Error;
};

// Iterative solver ran out of iterations.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double residual_;
  int iterations_;
};

}  // namespace hodgeflow
