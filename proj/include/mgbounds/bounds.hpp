#pragma once

#include <optional>
#include <string>

#include "mgbounds/twogrid.hpp"

namespace mgb {

/// Spectral data every inexact two-grid bound is written in.
struct SpectralQuantities {
  double r1 = 1.0;                 ///< lambda_min(B_c^{-1} A_c)
  double r2 = 1.0;                 ///< lambda_max(B_c^{-1} A_c)
  double K_TG = 1.0;
  double lam_min_MA = 1.0;         ///< lambda_min(M_tilde^{-1} A)
  double lam_max_MA = 1.0;         ///< lambda_max(M_tilde^{-1} A)
  double lam_min_plus_MAPi = 1.0;  ///< smallest positive eigenvalue of M_tilde^{-1} A Pi_A
  double theta = 0.0;              ///< ||I - A_c^{-1} B_c||_2
};

/// C1: r2 <= 1, C2: r1 <= 1 < r2, C3: 1 < r1.
enum class BoundCase { C1, C2, C3 };

std::string to_string(BoundCase c);

/// Ties within this distance of 1 fall to the lower-numbered case.
inline constexpr double kCaseTieTol = 1e-12;

BoundCase classify(double r1, double r2);

/// Condition-number and convergence-factor bounds that need theta < 1;
/// both are empty when theta >= 1.
struct ThetaBounds {
  std::optional<double> cond;
  std::optional<double> factor;
};

struct BoundReport {
  BoundCase case_id = BoundCase::C1;
  bool exact = false;  ///< r1 = r2 = 1 to the tie tolerance
  double lower = 0.0;
  double upper = 0.0;
  double notay_upper = 0.0;
  ThetaBounds fs;
  ThetaBounds improved_fs;
  double measured = 0.0;
  double measured_kappa = 0.0;

  bool sandwich_holds(double slack = 1e-9) const {
    return lower - slack <= measured && measured <= upper + slack;
  }
};

SpectralQuantities compute_quantities(const TwoGridSetup& setup, const TwoGridOperators& ops,
                                      double zero_tol = kDefaultZeroTol);

/// Extreme eigenvalues of (I - M_tilde^{-1}A)(I - Pi_A) and
/// (I - M_tilde^{-1}A) Pi_A, each obtained by one symmetric eigensolve.
struct Lemma31Values {
  double min_complement = 0.0;
  double max_complement = 0.0;
  double min_range = 0.0;
  double max_range = 0.0;
};

Lemma31Values lemma31_identities(const Matrix& A, const Matrix& M_tilde, const Matrix& Pi_A,
                                 Index dense_cap = kDefaultDenseCap);

/// (0, 1 - 1/K_TG, 0, 1 - lambda_min_plus) from the quantities.
Lemma31Values lemma31_formula_values(const SpectralQuantities& q);

/// Lower/upper estimate of ||E_ITG||_A selected by case; clamped to [0, inf).
/// measured and the theta fields are left for the caller.
BoundReport theorem32_bounds(const SpectralQuantities& q);

double notay_bound(const SpectralQuantities& q);

/// kappa <= (1+theta)/(1-theta) K_TG, factor <= max{theta/(1-theta), 1 - 1/((1+theta)K_TG)}.
ThetaBounds fs_bounds(const SpectralQuantities& q);

/// Case-split sharpening of fs_bounds.
ThetaBounds improved_fs_bounds(const SpectralQuantities& q);

/// lambda_max(B_ITG^{-1}A) / lambda_min(B_ITG^{-1}A).
double measured_kappa(const TwoGridOperators& ops, const Matrix& A,
                      Index dense_cap = kDefaultDenseCap);

/// Every bound plus the measured factor and kappa for one setup.
BoundReport evaluate_bounds(const TwoGridSetup& setup, const TwoGridOperators& ops,
                            const SpectralQuantities& q);

}  // namespace mgb
