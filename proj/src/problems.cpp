#include "mgbounds/problems.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

namespace mgb {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::poisson1d:
      return "poisson1d";
    case ProblemKind::poisson2d:
      return "poisson2d";
    case ProblemKind::random_spd:
      return "random_spd";
  }
  return "unknown";
}

ModelProblem poisson_1d(Index n) {
  if (n < 2) throw PreconditionError("poisson_1d: need n >= 2");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * n);
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return {Operator(std::move(A)), ProblemKind::poisson1d, {n}, 0};
}

ModelProblem poisson_2d(Index nx, Index ny) {
  if (nx < 2 || ny < 2) throw PreconditionError("poisson_2d: need nx, ny >= 2");
  const Index n = nx * ny;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * n);
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      const Index i = iy * nx + ix;
      t.emplace_back(i, i, 4.0);
      if (ix > 0) t.emplace_back(i, i - 1, -1.0);
      if (ix + 1 < nx) t.emplace_back(i, i + 1, -1.0);
      if (iy > 0) t.emplace_back(i, i - nx, -1.0);
      if (iy + 1 < ny) t.emplace_back(i, i + nx, -1.0);
    }
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return {Operator(std::move(A)), ProblemKind::poisson2d, {nx, ny}, 0};
}

ModelProblem random_spd(Index n, double target_condition, std::uint64_t seed) {
  if (n < 2) throw PreconditionError("random_spd: need n >= 2");
  if (!(target_condition >= 1.0)) {
    throw PreconditionError("random_spd: target_condition must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) G(i, j) = gauss(rng);

  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }

  Vector lambda(n);
  const double log_cond = std::log(target_condition);
  for (Index i = 0; i < n; ++i) {
    lambda(i) = std::exp(log_cond * double(i) / double(n - 1));
  }
  Matrix A = Q * lambda.asDiagonal() * Q.transpose();
  A = sym(A);
  return {Operator(A), ProblemKind::random_spd, {n}, seed};
}

void write_matrix_market(std::ostream& os, const Operator& A) {
  const SparseMatrix& S = A.sparse();
  Index nnz = 0;
  for (Index k = 0; k < S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(S, k); it; ++it)
      if (it.row() >= it.col()) ++nnz;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << A.rows() << ' ' << A.cols() << ' ' << nnz << '\n';
  os << std::setprecision(17);
  for (Index k = 0; k < S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(S, k); it; ++it)
      if (it.row() >= it.col())
        os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market(const std::string& path, const Operator& A) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_matrix_market(os, A);
}

}  // namespace mgb
