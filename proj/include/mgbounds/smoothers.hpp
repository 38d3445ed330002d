#pragma once

#include <memory>
#include <string>
#include <utility>

#include "mgbounds/operator.hpp"

namespace mgb {

enum class SmootherKind { jacobi, gauss_seidel, custom };

std::string to_string(SmootherKind kind);

/// A smoother M with its symmetrized variants
///   M_bar   = M (M + M^T - A)^{-1} M^T,
///   M_tilde = M^T (M + M^T - A)^{-1} M.
/// The symmetrizations are only present when M is A-convergent.
struct SmootherPair {
  Operator M;
  Matrix M_bar;
  Matrix M_tilde;
  bool a_convergent = false;
  SmootherKind kind = SmootherKind::custom;
  double omega = 1.0;
  /// M is lower triangular, so M^{-1} and M^{-T} are triangular solves.
  bool triangular = false;
  std::shared_ptr<const Eigen::PartialPivLU<Matrix>> lu;

  Index size() const { return M.rows(); }
};

/// M = D / omega with D = diag(A). Accepts 0 < omega <= 2; whether the
/// result is A-convergent is recorded, not enforced.
SmootherPair jacobi(const Operator& A, double omega);

/// M = lower triangle of A including the diagonal (forward sweep in row
/// order).
SmootherPair gauss_seidel(const Operator& A);

/// Any nonsingular M.
SmootherPair make_smoother(const Operator& A, const Operator& M,
                           SmootherKind kind = SmootherKind::custom);

/// (M_bar, M_tilde); throws InvariantViolation when M + M^T - A is not SPD.
std::pair<Matrix, Matrix> symmetrize(const Operator& M, const Operator& A);

/// M^{-1} x and M^{-T} x.
Vector smoother_solve(const SmootherPair& s, const Vector& x);
Vector smoother_solve_transpose(const SmootherPair& s, const Vector& x);

/// Dense M^{-1} X and M^{-T} X.
Matrix smoother_solve(const SmootherPair& s, const Matrix& X);
Matrix smoother_solve_transpose(const SmootherPair& s, const Matrix& X);

/// Smoother choice for a level that does not exist yet.
struct SmootherSpec {
  SmootherKind kind = SmootherKind::gauss_seidel;
  double omega = 1.0;
};

SmootherKind smoother_kind_from_string(const std::string& s);

/// jacobi(A, omega) or gauss_seidel(A); custom is rejected.
SmootherPair make_smoother(const Operator& A, const SmootherSpec& spec);

/// Inverse of M_bar without inverting M_bar: M^{-T} (M + M^T - A) M^{-1}.
Matrix m_bar_inverse(const SmootherPair& s, const Operator& A);

}  // namespace mgb
