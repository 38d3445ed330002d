#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mgbounds/operator.hpp"

namespace mgb {

enum class ProblemKind { poisson1d, poisson2d, random_spd };

std::string to_string(ProblemKind kind);

/// An SPD model matrix together with the data that produced it.
struct ModelProblem {
  Operator matrix;
  ProblemKind kind = ProblemKind::poisson1d;
  /// {n} for 1D, {nx, ny} for 2D, {n} for random matrices.
  std::vector<Index> grid_shape;
  std::uint64_t seed = 0;

  Index size() const { return matrix.rows(); }
};

/// Tridiagonal (-1, 2, -1) stencil on n interior points.
ModelProblem poisson_1d(Index n);

/// 5-point Laplacian on an nx-by-ny interior grid, lexicographic ordering
/// with x running fastest (unknown index = iy * nx + ix).
ModelProblem poisson_2d(Index nx, Index ny);

/// Q diag(lambda) Q^T with Q Haar-random orthogonal and lambda log-spaced on
/// [1, target_condition]. Bitwise reproducible for a given seed.
ModelProblem random_spd(Index n, double target_condition, std::uint64_t seed);

/// Lower triangle of a symmetric matrix in MatrixMarket coordinate format.
void write_matrix_market(std::ostream& os, const Operator& A);
void write_matrix_market(const std::string& path, const Operator& A);

}  // namespace mgb
