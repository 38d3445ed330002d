#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgbounds/problems.hpp"
#include "mgbounds/twogrid.hpp"

namespace mgb {

enum class Coarsening { geometric, amg };
enum class A0Policy { exact, scaled, spsd_bump };

std::string to_string(Coarsening c);
std::string to_string(A0Policy p);
Coarsening coarsening_from_string(const std::string& s);
A0Policy a0_policy_from_string(const std::string& s);

/// Coarsest-level solver. scaled: A0_hat = scale * A_0 (scale >= 1);
/// spsd_bump: A0_hat = A_0 + bump * max|A_0| * W^T W with W_ij ~ N(0, 1/n_0).
struct A0Spec {
  A0Policy policy = A0Policy::exact;
  double scale = 1.0;
  double bump = 0.0;
  std::uint64_t seed = 0;
};

/// Level k of a hierarchy. Level 0 carries only A_0; every level k >= 1
/// carries its smoother M_k and the prolongation P_k from level k-1.
struct Level {
  Operator A;
  std::optional<SmootherPair> smoother;
  std::optional<Prolongation> P;

  Index size() const { return A.rows(); }
};

struct Hierarchy {
  std::vector<Level> levels;  ///< levels[k], k = 0..L
  Matrix A0_hat;
  Eigen::LLT<Matrix> A0_hat_llt;
  int gamma = 1;
  Index dense_cap = kDefaultDenseCap;
  /// Non-fatal notes from the build (AMG stalls).
  std::vector<std::string> warnings;

  int L() const { return static_cast<int>(levels.size()) - 1; }
  const Level& level(int k) const { return levels.at(static_cast<std::size_t>(k)); }
};

inline constexpr int kMaxGamma = 8;

/// Galerkin hierarchy with L coarsening steps below the problem's grid.
/// Geometric coarsening needs odd grid sizes at every level and throws when
/// it cannot continue; AMG coarsening that stalls stops early and records a
/// warning.
Hierarchy build_hierarchy(const ModelProblem& problem, const SmootherSpec& smoother,
                          Coarsening coarsening, int L, int gamma, const A0Spec& a0 = {},
                          double strong_threshold = 0.25, Index dense_cap = kDefaultDenseCap);

/// Replaces the coarsest solver; A0_hat - A_0 must be SPSD.
void set_coarse_solver(Hierarchy& h, const Matrix& A0_hat);

/// One multigrid iteration at level k, recursive and matrix-free.
Vector mg_cycle(const Hierarchy& h, int k, const Vector& f, const Vector& u0);

/// Dense E_IMG^(k).
Matrix assemble_e_img(const Hierarchy& h, int k);

/// E_IMG^(1..k) from one recursion; entry 0 is empty.
std::vector<Matrix> assemble_e_img_all(const Hierarchy& h, int k);

/// B_c that turns the level-k multigrid iteration into an inexact two-grid
/// one: A0_hat for k = 1, A_{k-1}(I - (E_IMG^(k-1))^gamma)^{-1} above,
/// certified SPD.
Matrix implied_coarse(const Hierarchy& h, int k, const std::vector<Matrix>& e_img);
Matrix implied_coarse(const Hierarchy& h, int k);

/// The exact two-grid setup at level k (k >= 1).
TwoGridSetup level_setup(const Hierarchy& h, int k);

/// Eigenvalues of E in the A-inner product (ascending); throws
/// InvariantViolation unless they lie in [-1e-10, 1).
VectorX<double> e_img_spectrum(const Matrix& E, const Matrix& A,
                               Index dense_cap = kDefaultDenseCap);

/// ||E_IMG^(k)||_{A_k} by power iteration on mg_cycle with f = 0.
double estimate_sigma_img(const Hierarchy& h, int k, int max_iter = 500, double tol = 1e-10,
                          std::uint64_t seed = 0);

/// Per-level factors; vectors are indexed by level, entry 0 unused (NaN).
struct LevelQuantities {
  std::vector<double> sigma_tg;
  std::vector<double> sigma_img;
  std::vector<double> K_tg;
  std::vector<double> eps_k;
  double sigma_L = 0.0;
  double eps_L = 0.0;
  double delta_L = 0.0;
  /// Extreme eigenvalues of A0_hat^{-1} A_0.
  double a0_lambda_min = 1.0;
  double a0_lambda_max = 1.0;
  int gamma = 1;
  int L = 0;
  /// 0 < sigma_L < 1 - eps_L; bounds are inapplicable otherwise.
  bool nontrivial = false;
};

LevelQuantities level_quantities(const Hierarchy& h);
/// Same, reusing E_IMG^(1..L) from assemble_e_img_all.
LevelQuantities level_quantities(const Hierarchy& h, const std::vector<Matrix>& e_img);

/// F_gamma(x) = (1 - sigma - eps) x^gamma - x + sigma.
double f_gamma(double x, double sigma, double eps, int gamma);

/// The root of F_gamma in (sigma, sigma/(sigma+eps)] by bisection.
/// Requires 0 < sigma < 1 - eps, eps > 0, gamma >= 1.
double root_x_gamma(double sigma, double eps, int gamma);

struct Theorem42Result {
  double x_gamma = 1.0;
  double left_endpoint = 0.0;
  bool applicable = false;
  /// sigma_IMG^(k) <= x_gamma + 1e-9 for every k; only meaningful when applicable.
  bool holds = false;
};

Theorem42Result theorem42_bound(const LevelQuantities& q);

struct Corollary43Result {
  double v_bound = 1.0;
  double w_bound = 1.0;
};

Corollary43Result corollary43_bounds(double sigma, double eps);

/// x - (x - s1) * ((1 - sigma - eps) x^{gamma-1} sum_{j<gamma} (delta/x)^j)^{k-1}.
double theorem44_formula(double x, double s1, double sigma, double eps, double delta,
                         int gamma, int k);

/// Level-k bound started from the measured sigma_IMG^(1); empty when
/// sigma_IMG^(1) >= x_gamma or the quantities are trivial.
std::optional<double> theorem44_bound(const LevelQuantities& q, int k);

struct Corollary46Result {
  std::optional<double> general;  ///< needs eps > 0
  double v_special = 1.0;         ///< eps = 0, gamma = 1
  double w_special = 1.0;         ///< eps = 0, gamma = 2
};

Corollary46Result corollary46_bounds(double sigma, double eps, double delta, int gamma, int k);

/// Earlier W-cycle bound sigma/(1 - sigma); empty ("Fail") for sigma >= 1/2.
std::optional<double> existing_w_bound(double sigma);

}  // namespace mgb
