#pragma once

// Dense symmetric eigen-machinery. Everything here is header-only and
// templated on the scalar type of the Eigen expression passed in.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "mgbounds/errors.hpp"

namespace mgb {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr Index kDefaultDenseCap = 4096;
inline constexpr double kDefaultZeroTol = 1e-10;

/// Eigenvalues in ascending order, optionally with orthonormal eigenvectors
/// stored column-wise in the same order.
template <typename Scalar>
struct Spectrum {
  VectorX<Scalar> values;
  std::optional<MatrixX<Scalar>> vectors;

  Scalar min() const { return values(0); }
  Scalar max() const { return values(values.size() - 1); }
  Index size() const { return values.size(); }
};

template <typename Scalar>
struct SpdFunctions {
  MatrixX<Scalar> sqrt;
  MatrixX<Scalar> inv_sqrt;
  MatrixX<Scalar> inv;
};

inline void check_dense_cap(Index n, Index cap, const char* what) {
  if (n > cap) {
    throw DenseCapError(std::string(what) + ": dimension " +
                        std::to_string(n) + " exceeds dense cap " +
                        std::to_string(cap));
  }
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// max|S - S^T| <= rel_tol * max|S|.
template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& S,
                  typename Derived::Scalar rel_tol = 1e-12) {
  if (S.rows() != S.cols()) return false;
  const auto scale = max_abs(S);
  return max_abs(S - S.transpose()) <= rel_tol * scale;
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& S, const char* what,
                       typename Derived::Scalar rel_tol = 1e-12) {
  if (S.rows() != S.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
  if (!all_finite(S)) {
    throw PreconditionError(std::string(what) + ": non-finite entries");
  }
  if (!is_symmetric(S, rel_tol)) {
    throw NotSymmetricError(std::string(what) + ": matrix is not symmetric");
  }
}

/// Index of the first non-positive pivot of an unpivoted Cholesky
/// factorization, or nullopt when S is numerically SPD.
template <typename Derived>
std::optional<Index> cholesky_failure(const Eigen::MatrixBase<Derived>& S) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> L = S;
  const Index n = L.rows();
  for (Index j = 0; j < n; ++j) {
    Scalar d = L(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > Scalar(0))) return j;
    d = std::sqrt(d);
    L(j, j) = d;
    for (Index i = j + 1; i < n; ++i) {
      L(i, j) = (L(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / d;
    }
  }
  return std::nullopt;
}

/// Lower Cholesky factor of an SPD matrix; throws NotSpdError naming the
/// failing pivot otherwise.
template <typename Derived>
Eigen::LLT<MatrixX<typename Derived::Scalar>> cholesky(
    const Eigen::MatrixBase<Derived>& S, const char* what = "cholesky") {
  using Scalar = typename Derived::Scalar;
  require_symmetric(S, what, Scalar(1e-10));
  Eigen::LLT<MatrixX<Scalar>> llt(S.derived());
  if (llt.info() != Eigen::Success) {
    const auto pivot = cholesky_failure(S).value_or(0);
    throw NotSpdError(std::string(what) + ": not SPD, Cholesky fails at pivot " +
                          std::to_string(pivot),
                      pivot);
  }
  // A pivot that survives only through rounding (exactly singular input) is
  // rejected too.
  const Index n = S.rows();
  if (n > 0) {
    const Scalar floor = Scalar(n) * std::numeric_limits<Scalar>::epsilon() *
                         S.diagonal().cwiseAbs().maxCoeff();
    const auto d = llt.matrixLLT().diagonal();
    for (Index j = 0; j < n; ++j) {
      if (d(j) * d(j) <= floor) {
        throw NotSpdError(std::string(what) + ": numerically singular, pivot " +
                              std::to_string(j) + " vanishes",
                          j);
      }
    }
  }
  return llt;
}

template <typename Derived>
bool is_spd(const Eigen::MatrixBase<Derived>& S) {
  using Scalar = typename Derived::Scalar;
  if (!is_symmetric(S, Scalar(1e-10))) return false;
  Eigen::LLT<MatrixX<Scalar>> llt(S.derived());
  return llt.info() == Eigen::Success;
}

/// Eigenvalues (ascending) and optionally eigenvectors of a symmetric matrix.
/// Only the lower triangle is read after the symmetry check.
template <typename Derived>
Spectrum<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& S,
                                           bool want_vectors = false,
                                           Index dense_cap = kDefaultDenseCap) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(S, "sym_eig");
  check_dense_cap(S.rows(), dense_cap, "sym_eig");
  Spectrum<Scalar> out;
  if (S.rows() == 0) {
    out.values.resize(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(
      S.derived(), want_vectors ? Eigen::ComputeEigenvectors
                                : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("sym_eig: tridiagonal QR iteration did not converge");
  }
  out.values = es.eigenvalues();
  if (want_vectors) out.vectors = es.eigenvectors();
  return out;
}

/// Eigenvalues of B^{-1}A for symmetric A and SPD B, by Cholesky congruence:
/// B = LL^T, eig(L^{-1} A L^{-T}). Eigenvectors, when requested, are
/// B-orthonormal.
template <typename DerivedA, typename DerivedB>
Spectrum<typename DerivedA::Scalar> gen_sym_eig(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
    bool want_vectors = false, Index dense_cap = kDefaultDenseCap) {
  using Scalar = typename DerivedA::Scalar;
  require_symmetric(A, "gen_sym_eig(A)", Scalar(1e-10));
  if (A.rows() != B.rows() || B.rows() != B.cols()) {
    throw DimensionError("gen_sym_eig: pencil dimensions differ");
  }
  check_dense_cap(A.rows(), dense_cap, "gen_sym_eig");
  const auto llt = cholesky(B, "gen_sym_eig(B)");
  const auto L = llt.matrixL();
  MatrixX<Scalar> C = L.solve(A.derived());
  C = L.solve(C.transpose().eval());
  C = Scalar(0.5) * (C + C.transpose()).eval();
  auto spec = sym_eig(C, want_vectors, dense_cap);
  if (want_vectors) {
    spec.vectors = llt.matrixU().solve(*spec.vectors);
  }
  return spec;
}

/// S^{1/2}, S^{-1/2} and S^{-1} from one eigendecomposition.
template <typename Derived>
SpdFunctions<typename Derived::Scalar> spd_functions(
    const Eigen::MatrixBase<Derived>& S, Index dense_cap = kDefaultDenseCap) {
  using Scalar = typename Derived::Scalar;
  const auto spec = sym_eig(S, true, dense_cap);
  const Index n = S.rows();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  if (n > 0 && spec.min() <= Scalar(n) * eps * std::abs(spec.max())) {
    throw NotSpdError("spd_functions: matrix is not numerically SPD", -1);
  }
  const auto& Q = *spec.vectors;
  const VectorX<Scalar> root = spec.values.cwiseSqrt();
  SpdFunctions<Scalar> out;
  out.sqrt = Q * root.asDiagonal() * Q.transpose();
  out.inv_sqrt = Q * root.cwiseInverse().asDiagonal() * Q.transpose();
  out.inv = Q * spec.values.cwiseInverse().asDiagonal() * Q.transpose();
  return out;
}

/// Smallest eigenvalue strictly above zero_tol * lambda_max of an SPSD matrix.
template <typename Derived>
typename Derived::Scalar lambda_min_plus(const Eigen::MatrixBase<Derived>& S,
                                         double zero_tol = kDefaultZeroTol,
                                         Index dense_cap = kDefaultDenseCap) {
  using Scalar = typename Derived::Scalar;
  const auto spec = sym_eig(S, false, dense_cap);
  if (spec.size() == 0 || !(spec.max() > Scalar(0))) {
    throw PreconditionError("lambda_min_plus: zero matrix (no positive eigenvalue)");
  }
  const Scalar cut = Scalar(zero_tol) * spec.max();
  if (spec.min() < -cut) {
    throw PreconditionError("lambda_min_plus: matrix is not SPSD (eigenvalue " +
                            std::to_string(double(spec.min())) + ")");
  }
  for (Index i = 0; i < spec.size(); ++i) {
    if (spec.values(i) > cut) return spec.values(i);
  }
  throw PreconditionError("lambda_min_plus: zero matrix (no positive eigenvalue)");
}

/// Largest singular value, sqrt(lambda_max(B^T B)).
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& B,
                                       Index dense_cap = kDefaultDenseCap) {
  using Scalar = typename Derived::Scalar;
  if (!all_finite(B)) {
    throw PreconditionError("spectral_norm: non-finite entries");
  }
  if (B.size() == 0) return Scalar(0);
  MatrixX<Scalar> G = B.transpose() * B;
  G = Scalar(0.5) * (G + G.transpose()).eval();
  const auto spec = sym_eig(G, false, dense_cap);
  return std::sqrt(std::max(spec.max(), Scalar(0)));
}

/// Spectral norm of a matrix that should be symmetric up to rounding: the
/// largest |eigenvalue| of its symmetric part when the skew part is below
/// rel_tol, otherwise the general singular-value route.
template <typename Derived>
typename Derived::Scalar near_symmetric_norm(const Eigen::MatrixBase<Derived>& X,
                                             typename Derived::Scalar rel_tol,
                                             Index dense_cap = kDefaultDenseCap) {
  using Scalar = typename Derived::Scalar;
  const Scalar scale = std::max(max_abs(X), Scalar(1));
  if (max_abs(X - X.transpose()) <= rel_tol * scale) {
    MatrixX<Scalar> S = Scalar(0.5) * (X + X.transpose());
    const auto spec = sym_eig(S, false, dense_cap);
    return std::max(std::abs(spec.min()), std::abs(spec.max()));
  }
  return spectral_norm(X, dense_cap);
}

}  // namespace mgb
