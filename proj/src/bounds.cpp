#include "mgbounds/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace mgb {

std::string to_string(BoundCase c) {
  switch (c) {
    case BoundCase::C1:
      return "C1";
    case BoundCase::C2:
      return "C2";
    case BoundCase::C3:
      return "C3";
  }
  return "unknown";
}

BoundCase classify(double r1, double r2) {
  if (r2 <= 1.0 + kCaseTieTol) return BoundCase::C1;
  if (r1 <= 1.0 + kCaseTieTol) return BoundCase::C2;
  return BoundCase::C3;
}

namespace {

// S = L^T M_tilde^{-1} L and Q = L^T Pi_A L^{-T} for A = L L^T. Both are
// symmetric; Q is the orthogonal projector onto L^T Range(P).
struct SimilarForms {
  Matrix S;
  Matrix Q;
};

SimilarForms similar_forms(const Matrix& A, const Matrix& M_tilde, const Matrix& Pi_A,
                           Index dense_cap) {
  check_dense_cap(A.rows(), dense_cap, "similarity forms");
  const auto la = cholesky(A, "similarity forms (A)");
  const auto lm = cholesky(M_tilde, "similarity forms (M_tilde)");
  const Matrix L = la.matrixL();
  const Matrix Lt = la.matrixU();
  SimilarForms f;
  f.S = sym(Lt * lm.solve(L));
  f.Q = sym(la.matrixL().solve((Lt * Pi_A).transpose()).transpose());
  return f;
}

}  // namespace

SpectralQuantities compute_quantities(const TwoGridSetup& setup, const TwoGridOperators& ops,
                                      double zero_tol) {
  const Index cap = setup.dense_cap;
  const Matrix& A = setup.A.dense();
  const Matrix& Mt = setup.smoother.M_tilde;
  SpectralQuantities q;

  const auto coarse = gen_sym_eig(setup.A_c, setup.B_c, false, cap);
  q.r1 = coarse.min();
  q.r2 = coarse.max();

  q.K_TG = k_tg(A, Mt, setup.P.P.dense(), cap);

  const auto ma = gen_sym_eig(A, Mt, false, cap);
  q.lam_min_MA = ma.min();
  q.lam_max_MA = ma.max();

  const auto f = similar_forms(A, Mt, ops.Pi_A, cap);
  q.lam_min_plus_MAPi = lambda_min_plus(sym(f.Q * f.S * f.Q), zero_tol, cap);

  const Index nc = setup.coarse_size();
  const Matrix D = identity(nc) - Eigen::LLT<Matrix>(setup.A_c).solve(setup.B_c);
  q.theta = spectral_norm(D, cap);
  return q;
}

Lemma31Values lemma31_identities(const Matrix& A, const Matrix& M_tilde, const Matrix& Pi_A,
                                 Index dense_cap) {
  const auto f = similar_forms(A, M_tilde, Pi_A, dense_cap);
  const Index n = A.rows();
  const Matrix I = identity(n);
  const Matrix smooth = I - f.S;
  const Matrix comp = I - f.Q;
  const auto e1 = sym_eig(sym(comp * smooth * comp), false, dense_cap);
  const auto e2 = sym_eig(sym(f.Q * smooth * f.Q), false, dense_cap);
  return {e1.min(), e1.max(), e2.min(), e2.max()};
}

Lemma31Values lemma31_formula_values(const SpectralQuantities& q) {
  return {0.0, 1.0 - 1.0 / q.K_TG, 0.0, 1.0 - q.lam_min_plus_MAPi};
}

BoundReport theorem32_bounds(const SpectralQuantities& q) {
  const double r1 = q.r1;
  const double r2 = q.r2;
  const double K = q.K_TG;
  const double lmin = q.lam_min_MA;
  const double lmax = q.lam_max_MA;
  const double lp = q.lam_min_plus_MAPi;

  const double L1 = 1.0 - std::min(1.0 / K, lmin + r2 * (1.0 - lp));
  const double U1 = 1.0 - r1 / K - (1.0 - r1) * lmin;
  const double L2 = 1.0 - std::min(lmax, r2 / K - (r2 - 1.0) * lmin);
  const double U2 = (r2 - 1.0) * (1.0 - lp);
  const double L3 = r1 - 1.0 - std::min(r1 * lp - lmin, (r1 - 1.0) * lmax);
  const double U3 = std::max(1.0 - 1.0 / K, (r2 - 1.0) * (1.0 - lp));

  BoundReport rep;
  rep.case_id = classify(r1, r2);
  rep.exact = std::abs(r1 - 1.0) <= kCaseTieTol && std::abs(r2 - 1.0) <= kCaseTieTol;
  switch (rep.case_id) {
    case BoundCase::C1:
      rep.lower = L1;
      rep.upper = U1;
      break;
    case BoundCase::C2:
      rep.lower = L2;
      rep.upper = std::max(U1, U2);
      break;
    case BoundCase::C3:
      rep.lower = std::max(L2, L3);
      rep.upper = U3;
      break;
  }
  rep.lower = std::max(rep.lower, 0.0);
  rep.upper = std::max(rep.upper, 0.0);
  rep.notay_upper = notay_bound(q);
  return rep;
}

double notay_bound(const SpectralQuantities& q) {
  switch (classify(q.r1, q.r2)) {
    case BoundCase::C1:
      return 1.0 - q.r1 / q.K_TG;
    case BoundCase::C2:
      return std::max(1.0 - q.r1 / q.K_TG, q.r2 - 1.0);
    case BoundCase::C3:
      return std::max(1.0 - 1.0 / q.K_TG, q.r2 - 1.0);
  }
  return 1.0;
}

ThetaBounds fs_bounds(const SpectralQuantities& q) {
  const double t = q.theta;
  if (!(t < 1.0)) return {};
  const double K = q.K_TG;
  return {(1.0 + t) / (1.0 - t) * K,
          std::max(t / (1.0 - t), 1.0 - 1.0 / ((1.0 + t) * K))};
}

ThetaBounds improved_fs_bounds(const SpectralQuantities& q) {
  const double t = q.theta;
  if (!(t < 1.0)) return {};
  const double K = q.K_TG;
  const double lmin = q.lam_min_MA;
  const double lp = q.lam_min_plus_MAPi;
  const double base = (1.0 + t) / (1.0 - t) * K;
  const double smooth_gain = 1.0 + t * K * lmin;
  const double coarse_term = (t - t * lp) / (1.0 - t);
  const double c1_factor = 1.0 - smooth_gain / ((1.0 + t) * K);
  switch (classify(q.r1, q.r2)) {
    case BoundCase::C1:
      return {(1.0 - t) / smooth_gain * base, c1_factor};
    case BoundCase::C2:
      return {(1.0 - t * lp) / smooth_gain * base, std::max(c1_factor, coarse_term)};
    case BoundCase::C3:
      return {(1.0 - t * lp) / (1.0 + t) * base, std::max(1.0 - 1.0 / K, coarse_term)};
  }
  return {};
}

double measured_kappa(const TwoGridOperators& ops, const Matrix& A, Index dense_cap) {
  const auto llt = cholesky(A, "measured_kappa(A)");
  const Matrix L = llt.matrixL();
  const Matrix X = sym(L.transpose() * ops.B_ITG_inv * L);
  const auto spec = sym_eig(X, false, dense_cap);
  if (!(spec.min() > 0.0)) {
    throw InvariantViolation("measured_kappa: B_ITG^{-1} A has a non-positive eigenvalue");
  }
  return spec.max() / spec.min();
}

BoundReport evaluate_bounds(const TwoGridSetup& setup, const TwoGridOperators& ops,
                            const SpectralQuantities& q) {
  BoundReport rep = theorem32_bounds(q);
  rep.fs = fs_bounds(q);
  rep.improved_fs = improved_fs_bounds(q);
  rep.measured = conv_factor(ops.E_ITG, setup.A.dense(), setup.dense_cap);
  rep.measured_kappa = measured_kappa(ops, setup.A.dense(), setup.dense_cap);
  return rep;
}

}  // namespace mgb
