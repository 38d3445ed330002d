#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mgbounds/operator.hpp"

namespace mgb {

enum class InterpMethod { geometric1d, geometric2d, amg_direct, custom };

std::string to_string(InterpMethod method);

/// Prolongation P (n x n_c, full column rank) plus the coarse-point data
/// that produced it.
struct Prolongation {
  Operator P;
  InterpMethod method = InterpMethod::custom;
  /// 1 for coarse (C) points, 0 for fine (F) points, one entry per fine point.
  std::vector<int> coarse_marker;
  /// Coarse grid dimensions for geometric methods ({n_c} or {ncx, ncy}).
  std::vector<Index> coarse_grid;
  /// Every point became a C-point (P = I); not usable as a two-grid P.
  bool degenerate = false;

  Index fine_size() const { return P.rows(); }
  Index coarse_size() const { return P.cols(); }
};

/// Linear interpolation on n (odd) points; coarse points are the fine points
/// with odd 0-based index, columns are [1/2, 1, 1/2] hats.
Prolongation geometric_interp_1d(Index n);

/// Bilinear interpolation, the tensor product of the 1D hats, matched to the
/// x-fastest lexicographic ordering of poisson_2d.
Prolongation geometric_interp_2d(Index nx, Index ny);

/// Classical Ruge-Stueben first-pass coarsening followed by direct
/// interpolation. Only negative couplings are strong; positive off-diagonals
/// are lumped into the diagonal of the weight formula.
Prolongation amg_direct_interp(const Operator& A, double strong_threshold = 0.25);

/// Wraps an arbitrary full-rank P.
Prolongation make_prolongation(const Operator& P);

/// Galerkin product P^T A P, certified SPD by Cholesky.
Operator galerkin(const Operator& A, const Operator& P);

/// Smallest and largest singular values of P.
std::pair<double, double> singular_value_range(const Operator& P);

enum class CoarseMode { exact, scale, spd_noise, sparsify, identity_scale };

std::string to_string(CoarseMode mode);
CoarseMode coarse_mode_from_string(const std::string& s);

/// How B_c is derived from A_c.
///   exact:          B_c = A_c
///   scale:          B_c = alpha A_c
///   spd_noise:      B_c = A_c + magnitude max|A_c| W^T W, W_ij ~ N(0, 1/n_c)
///   sparsify:       off-diagonals below magnitude max|A_c| dropped, then
///                   shifted by (|lambda_min| + 0.01 lambda_max(A_c)) I if
///                   no longer SPD
///   identity_scale: B_c = alpha I
struct CoarsePerturbation {
  CoarseMode mode = CoarseMode::exact;
  double alpha = 1.0;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

Matrix perturb_coarse(const Matrix& A_c, const CoarsePerturbation& spec);

/// One 0/1 label per line (1 = coarse point).
void write_split(std::ostream& os, const Prolongation& P);
void write_split(const std::string& path, const Prolongation& P);

}  // namespace mgb
