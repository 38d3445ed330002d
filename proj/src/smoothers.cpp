#include "mgbounds/smoothers.hpp"

#include <cmath>
#include <string>

namespace mgb {

std::string to_string(SmootherKind kind) {
  switch (kind) {
    case SmootherKind::jacobi:
      return "jacobi";
    case SmootherKind::gauss_seidel:
      return "gauss_seidel";
    case SmootherKind::custom:
      return "custom";
  }
  return "unknown";
}

SmootherKind smoother_kind_from_string(const std::string& s) {
  if (s == "jacobi") return SmootherKind::jacobi;
  if (s == "gauss_seidel" || s == "gs") return SmootherKind::gauss_seidel;
  throw PreconditionError("unknown smoother '" + s + "' (expected jacobi or gauss_seidel)");
}

namespace {

bool is_lower_triangular(const SparseMatrix& S) {
  for (Index k = 0; k < S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(S, k); it; ++it)
      if (it.row() < it.col() && it.value() != 0.0) return false;
  return true;
}

bool is_diagonal(const SparseMatrix& S) {
  for (Index k = 0; k < S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(S, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

SparseMatrix coupling(const Operator& M, const Operator& A) {
  SparseMatrix W = M.sparse() + SparseMatrix(M.sparse().transpose()) - A.sparse();
  W.prune(0.0);
  return W;
}

}  // namespace

std::pair<Matrix, Matrix> symmetrize(const Operator& M, const Operator& A) {
  if (M.rows() != A.rows() || !M.square() || !A.square()) {
    throw DimensionError("symmetrize: M and A must be square of equal size");
  }
  const SparseMatrix W = coupling(M, A);
  const Matrix& Md = M.dense();
  Matrix WinvM;
  Matrix WinvMt;
  if (is_diagonal(W)) {
    const Vector w = Matrix(W).diagonal();
    if ((w.array() <= 0.0).any()) {
      throw InvariantViolation("smoother not A-convergent: M + M^T - A is not SPD");
    }
    const Vector winv = w.cwiseInverse();
    WinvM = winv.asDiagonal() * Md;
    WinvMt = winv.asDiagonal() * Md.transpose();
  } else {
    Eigen::LLT<Matrix> llt{Matrix(W)};
    if (llt.info() != Eigen::Success) {
      throw InvariantViolation("smoother not A-convergent: M + M^T - A is not SPD");
    }
    WinvM = llt.solve(Md);
    WinvMt = llt.solve(Matrix(Md.transpose()));
  }
  Matrix M_bar = Md * WinvMt;
  Matrix M_tilde = Md.transpose() * WinvM;
  return {sym(M_bar), sym(M_tilde)};
}

SmootherPair make_smoother(const Operator& A, const Operator& M, SmootherKind kind) {
  if (M.rows() != A.rows() || !M.square() || !A.square()) {
    throw DimensionError("smoother: M and A must be square of equal size");
  }
  SmootherPair s;
  s.M = M;
  s.kind = kind;
  s.triangular = is_lower_triangular(M.sparse());
  if (s.triangular) {
    if ((M.dense().diagonal().array() == 0.0).any()) {
      throw PreconditionError("smoother: M is singular (zero diagonal)");
    }
  } else {
    auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(M.dense());
    s.lu = std::move(lu);
  }
  const Matrix W = Matrix(coupling(M, A));
  Eigen::LLT<Matrix> llt(W);
  s.a_convergent = llt.info() == Eigen::Success;
  if (s.a_convergent) {
    auto [bar, tilde] = symmetrize(M, A);
    s.M_bar = std::move(bar);
    s.M_tilde = std::move(tilde);
  }
  return s;
}

SmootherPair jacobi(const Operator& A, double omega) {
  if (!(omega > 0.0 && omega <= 2.0)) {
    throw PreconditionError("jacobi: omega must lie in (0, 2]");
  }
  const Vector d = A.dense().diagonal();
  if ((d.array() <= 0.0).any()) {
    throw PreconditionError("jacobi: diagonal of A must be positive");
  }
  SparseMatrix M(A.rows(), A.rows());
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i) / omega);
  M.setFromTriplets(t.begin(), t.end());
  auto s = make_smoother(A, Operator(std::move(M)), SmootherKind::jacobi);
  s.omega = omega;
  return s;
}

SmootherPair gauss_seidel(const Operator& A) {
  SparseMatrix M = A.sparse().triangularView<Eigen::Lower>();
  if ((A.dense().diagonal().array() <= 0.0).any()) {
    throw PreconditionError("gauss_seidel: diagonal of A must be positive");
  }
  return make_smoother(A, Operator(std::move(M)), SmootherKind::gauss_seidel);
}

SmootherPair make_smoother(const Operator& A, const SmootherSpec& spec) {
  switch (spec.kind) {
    case SmootherKind::jacobi:
      return jacobi(A, spec.omega);
    case SmootherKind::gauss_seidel:
      return gauss_seidel(A);
    case SmootherKind::custom:
      break;
  }
  throw PreconditionError("make_smoother: a custom smoother needs an explicit M");
}

Vector smoother_solve(const SmootherPair& s, const Vector& x) {
  if (s.triangular) {
    return s.M.sparse().triangularView<Eigen::Lower>().solve(x);
  }
  return s.lu->solve(x);
}

Vector smoother_solve_transpose(const SmootherPair& s, const Vector& x) {
  if (s.triangular) {
    return s.M.sparse().transpose().triangularView<Eigen::Upper>().solve(x);
  }
  return s.lu->transpose().solve(x);
}

Matrix smoother_solve(const SmootherPair& s, const Matrix& X) {
  if (s.triangular) {
    return s.M.sparse().triangularView<Eigen::Lower>().solve(X);
  }
  return s.lu->solve(X);
}

Matrix smoother_solve_transpose(const SmootherPair& s, const Matrix& X) {
  if (s.triangular) {
    return s.M.sparse().transpose().triangularView<Eigen::Upper>().solve(X);
  }
  return s.lu->transpose().solve(X);
}

Matrix m_bar_inverse(const SmootherPair& s, const Operator& A) {
  const Matrix W = Matrix(coupling(s.M, A));
  const Matrix MinvT = smoother_solve_transpose(s, identity(s.size()));
  Matrix out = MinvT * W * MinvT.transpose();
  return sym(out);
}

}  // namespace mgb
