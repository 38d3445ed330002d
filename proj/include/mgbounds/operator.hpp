#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mgbounds/linalg.hpp"

namespace mgb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Real matrix kept in both sparse (for actions) and dense (for spectral
/// analysis) form. Immutable once built.
class Operator {
 public:
  Operator() = default;
  explicit Operator(SparseMatrix s);
  /// Entries with |a_ij| <= drop_tol * max|A| are left out of the sparse copy;
  /// the dense copy is stored verbatim.
  explicit Operator(const Matrix& d, double drop_tol = 0.0);

  Index rows() const { return dense_.rows(); }
  Index cols() const { return dense_.cols(); }
  bool square() const { return rows() == cols(); }

  const SparseMatrix& sparse() const { return sparse_; }
  const Matrix& dense() const { return dense_; }

  Vector apply(const Vector& x) const { return sparse_ * x; }
  Vector apply_transpose(const Vector& x) const { return sparse_.transpose() * x; }

 private:
  SparseMatrix sparse_;
  Matrix dense_;
};

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

/// Symmetric part of a square matrix.
inline Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace mgb
