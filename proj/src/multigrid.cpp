#include "mgbounds/multigrid.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace mgb {

std::string to_string(Coarsening c) {
  return c == Coarsening::geometric ? "geometric" : "amg";
}

std::string to_string(A0Policy p) {
  switch (p) {
    case A0Policy::exact:
      return "exact";
    case A0Policy::scaled:
      return "scaled";
    case A0Policy::spsd_bump:
      return "spsd_bump";
  }
  return "unknown";
}

Coarsening coarsening_from_string(const std::string& s) {
  if (s == "geometric") return Coarsening::geometric;
  if (s == "amg" || s == "amg_direct") return Coarsening::amg;
  throw PreconditionError("unknown coarsening '" + s + "' (expected geometric or amg)");
}

A0Policy a0_policy_from_string(const std::string& s) {
  if (s == "exact") return A0Policy::exact;
  if (s == "scaled") return A0Policy::scaled;
  if (s == "spsd_bump") return A0Policy::spsd_bump;
  throw PreconditionError("unknown a0 policy '" + s + "' (expected exact, scaled or spsd_bump)");
}

namespace {

void require_level(const Hierarchy& h, int k, const char* what) {
  if (k < 1 || k > h.L()) {
    throw PreconditionError(std::string(what) + ": level " + std::to_string(k) +
                            " outside [1, " + std::to_string(h.L()) + "]");
  }
}

Prolongation geometric_step(const ModelProblem& problem, std::vector<Index>& shape) {
  try {
    if (problem.kind == ProblemKind::poisson2d) {
      auto P = geometric_interp_2d(shape.at(0), shape.at(1));
      shape = P.coarse_grid;
      return P;
    }
    auto P = geometric_interp_1d(shape.at(0));
    shape = P.coarse_grid;
    return P;
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string("build_hierarchy: geometric coarsening stalls: ") +
                            e.what());
  }
}

Matrix matrix_power(const Matrix& E, int gamma) {
  Matrix out = E;
  for (int i = 1; i < gamma; ++i) out = out * E;
  return out;
}

}  // namespace

Hierarchy build_hierarchy(const ModelProblem& problem, const SmootherSpec& smoother,
                          Coarsening coarsening, int L, int gamma, const A0Spec& a0,
                          double strong_threshold, Index dense_cap) {
  if (L < 1) throw PreconditionError("build_hierarchy: need L >= 1");
  if (gamma < 1 || gamma > kMaxGamma) {
    throw PreconditionError("build_hierarchy: gamma must lie in [1, " +
                            std::to_string(kMaxGamma) + "]");
  }
  Hierarchy h;
  h.gamma = gamma;
  h.dense_cap = dense_cap;

  // Built fine to coarse, reversed at the end.
  std::vector<Level> down;
  down.push_back(Level{problem.matrix, std::nullopt, std::nullopt});
  std::vector<Index> shape =
      problem.grid_shape.empty() ? std::vector<Index>{problem.size()} : problem.grid_shape;
  for (int step = 0; step < L; ++step) {
    Level& fine = down.back();
    Prolongation P;
    if (coarsening == Coarsening::geometric) {
      P = geometric_step(problem, shape);
    } else {
      P = amg_direct_interp(fine.A, strong_threshold);
      if (P.degenerate || P.coarse_size() == 0 || P.coarse_size() >= fine.size()) {
        h.warnings.push_back("AMG coarsening stalled at n = " + std::to_string(fine.size()) +
                             "; hierarchy stops after " + std::to_string(step) + " levels");
        break;
      }
    }
    fine.smoother = make_smoother(fine.A, smoother);
    if (!fine.smoother->a_convergent) {
      throw InvariantViolation("build_hierarchy: smoother is not A-convergent at n = " +
                               std::to_string(fine.size()));
    }
    Operator Ac = galerkin(fine.A, P.P);
    fine.P = std::move(P);
    down.push_back(Level{std::move(Ac), std::nullopt, std::nullopt});
  }
  if (down.size() < 2) {
    throw PreconditionError("build_hierarchy: no coarse level could be built");
  }
  h.levels.assign(down.rbegin(), down.rend());

  const Matrix& A0 = h.levels[0].A.dense();
  Matrix A0_hat;
  switch (a0.policy) {
    case A0Policy::exact:
      A0_hat = A0;
      break;
    case A0Policy::scaled:
      if (!(a0.scale >= 1.0)) {
        throw PreconditionError("build_hierarchy: scaled coarsest solver needs scale >= 1");
      }
      A0_hat = a0.scale * A0;
      break;
    case A0Policy::spsd_bump:
      if (!(a0.bump >= 0.0)) {
        throw PreconditionError("build_hierarchy: spsd bump must be >= 0");
      }
      A0_hat = perturb_coarse(A0, {CoarseMode::spd_noise, 1.0, a0.bump, a0.seed});
      break;
  }
  set_coarse_solver(h, A0_hat);
  return h;
}

void set_coarse_solver(Hierarchy& h, const Matrix& A0_hat) {
  const Matrix& A0 = h.levels.at(0).A.dense();
  if (A0_hat.rows() != A0.rows() || A0_hat.cols() != A0.cols()) {
    throw DimensionError("set_coarse_solver: A0_hat must match A_0");
  }
  auto llt = cholesky(A0_hat, "set_coarse_solver(A0_hat)");
  const auto pencil = gen_sym_eig(A0, A0_hat, false, h.dense_cap);
  if (pencil.max() > 1.0 + 1e-12) {
    throw PreconditionError("set_coarse_solver: A0_hat - A_0 is not SPSD");
  }
  h.A0_hat = sym(A0_hat);
  h.A0_hat_llt = std::move(llt);
}

Vector mg_cycle(const Hierarchy& h, int k, const Vector& f, const Vector& u0) {
  require_level(h, k, "mg_cycle");
  const Level& lv = h.level(k);
  if (f.size() != lv.size() || u0.size() != lv.size()) {
    throw DimensionError("mg_cycle: vector sizes do not match level " + std::to_string(k));
  }
  const Operator& A = lv.A;
  const Operator& P = lv.P->P;
  Vector u = u0 + smoother_solve(*lv.smoother, Vector(f - A.apply(u0)));
  const Vector rc = P.apply_transpose(f - A.apply(u));
  Vector ec;
  if (k == 1) {
    ec = h.A0_hat_llt.solve(rc);
  } else {
    ec = Vector::Zero(rc.size());
    for (int i = 0; i < h.gamma; ++i) ec = mg_cycle(h, k - 1, rc, ec);
  }
  u += P.apply(ec);
  u += smoother_solve_transpose(*lv.smoother, Vector(f - A.apply(u)));
  return u;
}

std::vector<Matrix> assemble_e_img_all(const Hierarchy& h, int k) {
  require_level(h, k, "assemble_e_img");
  std::vector<Matrix> E(static_cast<std::size_t>(k) + 1);
  for (int j = 1; j <= k; ++j) {
    const Level& lv = h.level(j);
    check_dense_cap(lv.size(), h.dense_cap, "assemble_e_img");
    const Matrix& A = lv.A.dense();
    const Matrix& P = lv.P->P.dense();
    const Matrix I = identity(lv.size());
    const Matrix PtA = P.transpose() * A;
    // Coarse correction operator applied to P^T A.
    Matrix C;
    if (j == 1) {
      C = h.A0_hat_llt.solve(PtA);
    } else {
      const Matrix& Ac = h.level(j - 1).A.dense();
      const Matrix Y = Eigen::LLT<Matrix>(Ac).solve(PtA);
      C = Y - matrix_power(E[static_cast<std::size_t>(j) - 1], h.gamma) * Y;
    }
    const Matrix pre = I - smoother_solve(*lv.smoother, A);
    const Matrix post = I - smoother_solve_transpose(*lv.smoother, A);
    E[static_cast<std::size_t>(j)] = post * ((I - P * C) * pre);
  }
  return E;
}

Matrix assemble_e_img(const Hierarchy& h, int k) {
  auto all = assemble_e_img_all(h, k);
  return std::move(all.back());
}

Matrix implied_coarse(const Hierarchy& h, int k, const std::vector<Matrix>& e_img) {
  require_level(h, k, "implied_coarse");
  if (k == 1) return h.A0_hat;
  if (static_cast<int>(e_img.size()) < k || e_img[static_cast<std::size_t>(k) - 1].size() == 0) {
    throw PreconditionError("implied_coarse: E_IMG of level k-1 is missing");
  }
  const Matrix& Ac = h.level(k - 1).A.dense();
  const Matrix C = identity(Ac.rows()) - matrix_power(e_img[static_cast<std::size_t>(k) - 1], h.gamma);
  // B_c = A_c C^{-1}, i.e. B_c^T = C^{-T} A_c.
  Matrix B = C.transpose().partialPivLu().solve(Ac).transpose();
  if (!is_symmetric(B, 1e-8)) {
    throw InvariantViolation("implied_coarse: A_{k-1}(I - E^gamma)^{-1} is not symmetric");
  }
  B = sym(B);
  cholesky(B, "implied_coarse");
  return B;
}

Matrix implied_coarse(const Hierarchy& h, int k) {
  if (k == 1) return implied_coarse(h, k, {});
  return implied_coarse(h, k, assemble_e_img_all(h, k - 1));
}

TwoGridSetup level_setup(const Hierarchy& h, int k) {
  require_level(h, k, "level_setup");
  const Level& lv = h.level(k);
  return make_exact_setup(lv.A, *lv.smoother, *lv.P, h.dense_cap);
}

VectorX<double> e_img_spectrum(const Matrix& E, const Matrix& A, Index dense_cap) {
  check_dense_cap(A.rows(), dense_cap, "e_img_spectrum");
  const auto llt = cholesky(A, "e_img_spectrum(A)");
  const Matrix Lt = llt.matrixU();
  const Matrix LtE = Lt * E;
  const Matrix X = llt.matrixL().solve(LtE.transpose()).transpose();
  if (!is_symmetric(X, 1e-8)) {
    throw InvariantViolation("multigrid iteration matrix is not A-self-adjoint");
  }
  const auto spec = sym_eig(sym(X), false, dense_cap);
  if (spec.min() < -1e-10 || spec.max() >= 1.0) {
    throw InvariantViolation("hierarchy not A-convergent: spectrum of E_IMG leaves [0, 1)");
  }
  return spec.values;
}

double estimate_sigma_img(const Hierarchy& h, int k, int max_iter, double tol,
                          std::uint64_t seed) {
  require_level(h, k, "estimate_sigma_img");
  const Operator& A = h.level(k).A;
  const Index n = A.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector e(n);
  for (Index i = 0; i < n; ++i) e(i) = gauss(rng);
  const Vector zero = Vector::Zero(n);
  double rho = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector Ae = A.apply(e);
    e /= std::sqrt(e.dot(Ae));
    const Vector Ee = mg_cycle(h, k, zero, e);
    const double next = A.apply(Ee).dot(e);  // Rayleigh quotient in the A-inner product
    e = Ee;
    if (it > 0 && std::abs(next - rho) <= tol * std::abs(next)) return next;
    rho = next;
  }
  return rho;
}

LevelQuantities level_quantities(const Hierarchy& h) {
  return level_quantities(h, assemble_e_img_all(h, h.L()));
}

LevelQuantities level_quantities(const Hierarchy& h, const std::vector<Matrix>& E) {
  const int L = h.L();
  if (static_cast<int>(E.size()) != L + 1) {
    throw DimensionError("level_quantities: need E_IMG for every level");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  LevelQuantities q;
  q.L = L;
  q.gamma = h.gamma;
  q.sigma_tg.assign(L + 1, nan);
  q.sigma_img.assign(L + 1, nan);
  q.K_tg.assign(L + 1, nan);
  q.eps_k.assign(L + 1, nan);

  for (int k = 1; k <= L; ++k) {
    const Level& lv = h.level(k);
    const Matrix& A = lv.A.dense();
    const Matrix& Mt = lv.smoother->M_tilde;
    q.K_tg[k] = k_tg(A, Mt, lv.P->P.dense(), h.dense_cap);
    q.sigma_tg[k] = 1.0 - 1.0 / q.K_tg[k];
    q.eps_k[k] = gen_sym_eig(A, Mt, false, h.dense_cap).min();
    const auto spec = e_img_spectrum(E[k], A, h.dense_cap);
    q.sigma_img[k] = std::max(std::abs(spec(0)), std::abs(spec(spec.size() - 1)));
  }
  q.sigma_L = q.sigma_tg[1];
  q.delta_L = q.sigma_tg[1];
  q.eps_L = q.eps_k[1];
  for (int k = 2; k <= L; ++k) {
    q.sigma_L = std::max(q.sigma_L, q.sigma_tg[k]);
    q.delta_L = std::min(q.delta_L, q.sigma_tg[k]);
    q.eps_L = std::min(q.eps_L, q.eps_k[k]);
  }
  for (int k = 1; k <= L; ++k) {
    if (q.sigma_tg[k] > 1.0 - q.eps_L + 1e-9) {
      throw InvariantViolation("level_quantities: sigma_TG exceeds 1 - eps_L at level " +
                               std::to_string(k));
    }
  }
  const auto pencil = gen_sym_eig(h.level(0).A.dense(), h.A0_hat, false, h.dense_cap);
  q.a0_lambda_min = pencil.min();
  q.a0_lambda_max = pencil.max();
  q.nontrivial = q.sigma_L > 0.0 && q.sigma_L < 1.0 - q.eps_L && q.eps_L > 0.0;
  return q;
}

double f_gamma(double x, double sigma, double eps, int gamma) {
  return (1.0 - sigma - eps) * std::pow(x, gamma) - x + sigma;
}

double root_x_gamma(double sigma, double eps, int gamma) {
  if (gamma < 1) throw PreconditionError("root_x_gamma: gamma must be >= 1");
  if (!(eps > 0.0 && sigma > 0.0 && sigma < 1.0 - eps)) {
    throw PreconditionError("root_x_gamma: need eps > 0 and 0 < sigma < 1 - eps");
  }
  const double upper = sigma / (sigma + eps);
  if (gamma == 1) return upper;
  // F(sigma) > 0 >= F(upper).
  double lo = sigma;
  double hi = upper;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f_gamma(mid, sigma, eps, gamma) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

Theorem42Result theorem42_bound(const LevelQuantities& q) {
  Theorem42Result r;
  if (!q.nontrivial) return r;
  r.x_gamma = root_x_gamma(q.sigma_L, q.eps_L, q.gamma);
  r.left_endpoint = (1.0 - q.eps_L - r.x_gamma) / (1.0 - q.eps_L - q.sigma_L);
  r.applicable = q.a0_lambda_min >= r.left_endpoint - 1e-12 && q.a0_lambda_max <= 1.0 + 1e-12;
  r.holds = true;
  for (int k = 1; k <= q.L; ++k) {
    if (!(q.sigma_img[k] <= r.x_gamma + 1e-9)) r.holds = false;
  }
  return r;
}

Corollary43Result corollary43_bounds(double sigma, double eps) {
  if (!(eps >= 0.0 && sigma > 0.0 && sigma < 1.0 - eps)) {
    throw PreconditionError("corollary43_bounds: need 0 < sigma < 1 - eps");
  }
  const double d = 1.0 - 2.0 * sigma;
  return {sigma / (sigma + eps), 2.0 * sigma / (1.0 + std::sqrt(d * d + 4.0 * sigma * eps))};
}

double theorem44_formula(double x, double s1, double sigma, double eps, double delta,
                         int gamma, int k) {
  double sum = 0.0;
  double term = 1.0;
  for (int j = 0; j < gamma; ++j) {
    sum += term;
    term *= delta / x;
  }
  const double rho = (1.0 - sigma - eps) * std::pow(x, gamma - 1) * sum;
  return x - (x - s1) * std::pow(rho, k - 1);
}

std::optional<double> theorem44_bound(const LevelQuantities& q, int k) {
  if (!q.nontrivial || k < 1) return std::nullopt;
  const double x = root_x_gamma(q.sigma_L, q.eps_L, q.gamma);
  const double s1 = q.sigma_img.at(1);
  if (!(s1 < x)) return std::nullopt;
  return theorem44_formula(x, s1, q.sigma_L, q.eps_L, q.delta_L, q.gamma, k);
}

Corollary46Result corollary46_bounds(double sigma, double eps, double delta, int gamma,
                                     int k) {
  if (!(sigma > 0.0 && sigma < 1.0) || k < 1) {
    throw PreconditionError("corollary46_bounds: need 0 < sigma < 1 and k >= 1");
  }
  Corollary46Result r;
  if (eps > 0.0 && sigma < 1.0 - eps) {
    const double x = root_x_gamma(sigma, eps, gamma);
    r.general = theorem44_formula(x, sigma, sigma, eps, delta, gamma, k);
  }
  const double keep = 1.0 - sigma;
  r.v_special = 1.0 - std::pow(keep, k);
  if (sigma < 0.5) {
    r.w_special = sigma / keep - sigma * sigma / keep * std::pow(sigma + keep * delta, k - 1);
  } else {
    r.w_special = 1.0 - std::pow(keep, k) * std::pow(1.0 + delta, k - 1);
  }
  return r;
}

std::optional<double> existing_w_bound(double sigma) {
  if (sigma >= 0.5) return std::nullopt;
  return sigma / (1.0 - sigma);
}

}  // namespace mgb
