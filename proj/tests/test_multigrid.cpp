#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "mgbounds/multigrid.hpp"
#include "oracles.hpp"

using namespace mgb;

namespace {

Hierarchy gs_hierarchy(const ModelProblem& p, int L, int gamma, A0Spec a0 = {}) {
  return build_hierarchy(p, SmootherSpec{}, Coarsening::geometric, L, gamma, a0);
}

double x2_closed(double s, double e) {
  return 2.0 * s / (1.0 + std::sqrt((1.0 - 2.0 * s) * (1.0 - 2.0 * s) + 4.0 * s * e));
}

}  // namespace

TEST_CASE("hierarchy sizes under geometric halving") {
  const auto h = gs_hierarchy(poisson_2d(31, 31), 3, 1);
  REQUIRE(h.L() == 3);
  CHECK(h.level(3).size() == 961);
  CHECK(h.level(2).size() == 225);
  CHECK(h.level(1).size() == 49);
  CHECK(h.level(0).size() == 9);
  for (int k = 1; k <= 3; ++k) {
    const Matrix& Af = h.level(k).A.dense();
    const Matrix& P = h.level(k).P->P.dense();
    const Matrix Ac = P.transpose() * Af * P;
    CHECK(oracle::max_abs(Ac - h.level(k - 1).A.dense()) <= 1e-12 * oracle::max_abs(Ac));
  }
  CHECK(h.warnings.empty());
}

TEST_CASE("build_hierarchy rejects bad input") {
  CHECK_THROWS_AS(gs_hierarchy(poisson_1d(7), 0, 1), PreconditionError);
  CHECK_THROWS_AS(gs_hierarchy(poisson_1d(7), 1, 0), PreconditionError);
  CHECK_THROWS_AS(gs_hierarchy(poisson_1d(7), 1, kMaxGamma + 1), PreconditionError);
  // 7 -> 3 -> 1 and then nothing left to coarsen.
  CHECK_THROWS_AS(gs_hierarchy(poisson_1d(7), 3, 1), PreconditionError);
  CHECK_THROWS(gs_hierarchy(poisson_1d(8), 1, 1));
  // 2D/1.5 - A is indefinite on the 2D Laplacian.
  CHECK_THROWS_AS(build_hierarchy(poisson_2d(7, 7), SmootherSpec{SmootherKind::jacobi, 1.5},
                                  Coarsening::geometric, 1, 1),
                  InvariantViolation);
}

TEST_CASE("AMG coarsening that stalls stops early with a warning") {
  const auto h = build_hierarchy(poisson_1d(7), SmootherSpec{}, Coarsening::amg, 6, 1);
  CHECK(h.L() >= 1);
  CHECK(h.L() < 6);
  CHECK_FALSE(h.warnings.empty());
}

TEST_CASE("coarsest solver policies") {
  const auto p = poisson_1d(15);
  const auto exact = gs_hierarchy(p, 2, 1);
  CHECK(oracle::max_abs(exact.A0_hat - exact.level(0).A.dense()) == 0.0);
  const auto q = level_quantities(exact);
  CHECK(q.a0_lambda_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.a0_lambda_max == doctest::Approx(1.0).epsilon(1e-12));

  A0Spec scaled{A0Policy::scaled, 2.0, 0.0, 0};
  const auto hs = gs_hierarchy(p, 2, 1, scaled);
  const auto qs = level_quantities(hs);
  CHECK(qs.a0_lambda_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(qs.a0_lambda_max == doctest::Approx(0.5).epsilon(1e-12));

  A0Spec bump{A0Policy::spsd_bump, 1.0, 0.3, 5};
  const auto hb = gs_hierarchy(p, 2, 1, bump);
  const auto qb = level_quantities(hb);
  CHECK(qb.a0_lambda_max <= 1.0 + 1e-12);
  CHECK(qb.a0_lambda_min > 0.0);

  Hierarchy h = gs_hierarchy(p, 2, 1);
  CHECK_THROWS(set_coarse_solver(h, Matrix(0.5 * h.level(0).A.dense())));
  CHECK_THROWS(gs_hierarchy(p, 2, 1, A0Spec{A0Policy::scaled, 0.5, 0.0, 0}));
}

TEST_CASE("L = 1 is the exact two-grid method") {
  for (int gamma : {1, 2, 3}) {
    const auto h = gs_hierarchy(poisson_1d(15), 1, gamma);
    const Matrix E = assemble_e_img(h, 1);
    const auto ops = assemble(level_setup(h, 1));
    CHECK(oracle::max_abs(E - ops.E_TG) <= 1e-12);
    const auto q = level_quantities(h);
    CHECK(q.sigma_L == doctest::Approx(q.sigma_tg[1]));
    CHECK(q.delta_L == doctest::Approx(q.sigma_tg[1]));
    CHECK(q.sigma_img[1] == doctest::Approx(q.sigma_tg[1]).epsilon(1e-10));
  }
}

TEST_CASE("mg_cycle: fixed point and matrix consistency") {
  const auto h = build_hierarchy(poisson_2d(15, 15), SmootherSpec{SmootherKind::jacobi, 0.5},
                                 Coarsening::geometric, 2, 2);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  auto rand_vec = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
  };
  const auto E = assemble_e_img_all(h, 2);
  for (int k = 1; k <= 2; ++k) {
    const Matrix& A = h.level(k).A.dense();
    const Index n = A.rows();
    const Eigen::LLT<Matrix> llt(A);

    const Vector f = rand_vec(n);
    const Vector x = llt.solve(f);
    CHECK((mg_cycle(h, k, f, x) - x).norm() <= 1e-12 * x.norm());

    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Vector g = rand_vec(n);
      const Vector u0 = rand_vec(n);
      const Vector xs = llt.solve(g);
      const Vector e1 = mg_cycle(h, k, g, u0) - xs;
      const Vector expect = E[static_cast<std::size_t>(k)] * (u0 - xs);
      worst = std::max(worst, (e1 - expect).norm() / expect.norm());
    }
    CHECK(worst <= 1e-10);
  }
  CHECK_THROWS(mg_cycle(h, 2, Vector::Zero(3), Vector::Zero(3)));
}

TEST_CASE("level-k iteration is an inexact two-grid method with the implied B_c") {
  for (int gamma : {1, 2}) {
    const auto h = gs_hierarchy(poisson_2d(15, 15), 2, gamma, A0Spec{A0Policy::scaled, 1.05, 0, 0});
    const auto E = assemble_e_img_all(h, 2);
    for (int k = 1; k <= 2; ++k) {
      const Matrix Bc = implied_coarse(h, k, E);
      CHECK(is_spd(Bc));
      auto base = level_setup(h, k);
      const auto s = make_setup(base.A, base.smoother, base.P, Bc);
      const Matrix& A = h.level(k).A.dense();
      const Matrix M = h.level(k).smoother->M.dense();
      const Matrix Eitg = oracle::e_itg(A, M, h.level(k).P->P.dense(), Bc);
      CHECK(oracle::max_abs(assemble(s).E_ITG - E[static_cast<std::size_t>(k)]) <= 1e-9);
      CHECK(oracle::max_abs(Eitg - E[static_cast<std::size_t>(k)]) <= 1e-9);
    }
  }
}

TEST_CASE("per-level quantities and invariants") {
  const auto h = gs_hierarchy(poisson_2d(15, 15), 2, 2);
  const auto E = assemble_e_img_all(h, 2);
  const auto q = level_quantities(h, E);
  REQUIRE(q.L == 2);
  double s_max = 0.0, s_min = 1.0, e_min = 1e300;
  for (int k = 1; k <= 2; ++k) {
    const Matrix& A = h.level(k).A.dense();
    CHECK(q.sigma_tg[k] == doctest::Approx(1.0 - 1.0 / q.K_tg[k]).epsilon(1e-12));
    CHECK(q.sigma_img[k] >= q.sigma_tg[k] - 1e-12);
    CHECK(q.sigma_img[k] == doctest::Approx(oracle::a_norm(E[static_cast<std::size_t>(k)], A)).epsilon(1e-9));
    const Vector ev = oracle::real_eigs(h.level(k).smoother->M_tilde.inverse() * A);
    CHECK(q.eps_k[k] == doctest::Approx(ev(0)).epsilon(1e-10));
    const auto spec = e_img_spectrum(E[static_cast<std::size_t>(k)], A);
    CHECK(spec.minCoeff() >= -1e-10);
    CHECK(spec.maxCoeff() < 1.0);
    s_max = std::max(s_max, q.sigma_tg[k]);
    s_min = std::min(s_min, q.sigma_tg[k]);
    e_min = std::min(e_min, q.eps_k[k]);
  }
  CHECK(q.sigma_L == s_max);
  CHECK(q.delta_L == s_min);
  CHECK(q.eps_L == e_min);
  CHECK(q.nontrivial);
  // Recursion sigma_IMG^(2) <= sigma_TG^(2) + (sigma_IMG^(1))^2 (1 - sigma_TG^(2) - eps_2).
  CHECK(q.sigma_img[2] <= q.sigma_tg[2] + q.sigma_img[1] * q.sigma_img[1] *
                                              (1.0 - q.sigma_tg[2] - q.eps_k[2]) + 1e-9);

  const double est = estimate_sigma_img(h, 2);
  CHECK(est <= q.sigma_img[2] + 1e-9);
  CHECK(est >= q.sigma_img[2] - 1e-4);
}

TEST_CASE("e_img_spectrum rejects a divergent iteration") {
  const Matrix A = poisson_1d(5).matrix.dense();
  CHECK_THROWS_AS(e_img_spectrum(Matrix(1.5 * identity(5)), A), InvariantViolation);
}

TEST_CASE("root of F_gamma") {
  CHECK(root_x_gamma(0.4, 0.1, 1) == 0.4 / 0.5);
  CHECK(root_x_gamma(0.3, 0.2, 1) == 0.3 / 0.5);
  for (double s : {0.1, 0.4, 0.7}) {
    for (double e : {0.01, 0.1, 0.25}) {
      if (s >= 1.0 - e) continue;
      const double x = root_x_gamma(s, e, 2);
      CHECK(std::abs(x - x2_closed(s, e)) <= 1e-12);
      CHECK(std::abs(f_gamma(x, s, e, 2)) <= 1e-13);
    }
  }
  double prev = 1.0;
  for (int g = 1; g <= 10; ++g) {
    const double x = root_x_gamma(0.4, 0.1, g);
    CHECK(x < prev);
    CHECK(x > 0.4);
    CHECK(x <= 0.4 / 0.5);
    CHECK(std::abs(f_gamma(x, 0.4, 0.1, g)) <= 1e-13);
    prev = x;
  }
  CHECK(root_x_gamma(0.4, 0.1, 64) - 0.4 <= root_x_gamma(0.4, 0.1, 10) - 0.4);
  CHECK_THROWS_AS(root_x_gamma(0.4, 0.0, 2), PreconditionError);
  CHECK_THROWS_AS(root_x_gamma(0.0, 0.1, 2), PreconditionError);
  CHECK_THROWS_AS(root_x_gamma(0.95, 0.1, 2), PreconditionError);
  CHECK_THROWS_AS(root_x_gamma(0.4, 0.1, 0), PreconditionError);
}

TEST_CASE("V- and W-cycle closed forms") {
  const auto c = corollary43_bounds(0.4, 0.2);
  CHECK(c.v_bound == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(c.w_bound == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.w_bound == doctest::Approx(root_x_gamma(0.4, 0.2, 2)).epsilon(1e-12));
  CHECK(c.w_bound < 0.4 / 0.6);
  // eps -> 1 - sigma: v -> sigma.
  CHECK(corollary43_bounds(0.3, 0.7 - 1e-12).v_bound == doctest::Approx(0.3).epsilon(1e-9));
  // eps = 0: w = 2 sigma / (1 + |1 - 2 sigma|) = sigma / (1 - sigma) for sigma < 1/2.
  CHECK(corollary43_bounds(0.462, 0.0).w_bound == doctest::Approx(0.462 / 0.538).epsilon(1e-12));
}

TEST_CASE("level-dependent bound formula") {
  const double s = 0.4, e = 0.1, d = 0.2;
  for (int g : {1, 2, 3}) {
    const double x = root_x_gamma(s, e, g);
    const double s1 = 0.3;
    CHECK(theorem44_formula(x, s1, s, e, d, g, 1) == doctest::Approx(s1).epsilon(1e-15));
    double prev = s1;
    for (int k = 2; k <= 12; ++k) {
      const double v = theorem44_formula(x, s1, s, e, d, g, k);
      CHECK(v > prev);
      CHECK(v < x);
      prev = v;
    }
    CHECK(theorem44_formula(x, s1, s, e, d, g, 2000) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("special-case bounds and the existing W-cycle bound") {
  const auto gs = corollary46_bounds(0.462, 0.0, 0.232, 2, 5);
  CHECK(std::abs(gs.v_special - 0.955) <= 5e-4);
  CHECK(std::abs(gs.w_special - 0.812) <= 5e-4);
  CHECK_FALSE(gs.general.has_value());
  const auto jac = corollary46_bounds(0.625, 0.0, 0.292, 2, 5);
  CHECK(std::abs(jac.v_special - 0.993) <= 5e-4);
  CHECK(std::abs(jac.w_special - 0.979) <= 5e-4);
  CHECK(std::abs(*existing_w_bound(0.462) - 0.859) <= 5e-4);
  CHECK_FALSE(existing_w_bound(0.625).has_value());

  const auto k1 = corollary46_bounds(0.3, 0.1, 0.2, 2, 1);
  CHECK(*k1.general == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(k1.v_special == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(k1.w_special == doctest::Approx(0.3).epsilon(1e-14));
  const auto k1b = corollary46_bounds(0.6, 0.0, 0.2, 2, 1);
  CHECK(k1b.w_special == doctest::Approx(0.6).epsilon(1e-14));

  // The general form at eps -> 0 tends to the special forms.
  const auto near = corollary46_bounds(0.462, 1e-12, 0.232, 1, 5);
  CHECK(*near.general == doctest::Approx(gs.v_special).epsilon(1e-8));
  const auto near_w = corollary46_bounds(0.462, 1e-12, 0.232, 2, 5);
  CHECK(*near_w.general == doctest::Approx(gs.w_special).epsilon(1e-8));
}

TEST_CASE("level-independent bound on a real hierarchy") {
  const auto h = gs_hierarchy(poisson_2d(15, 15), 3, 2);
  const auto q = level_quantities(h);
  const auto t = theorem42_bound(q);
  CHECK(t.applicable);
  CHECK(t.holds);
  CHECK(t.x_gamma == doctest::Approx(root_x_gamma(q.sigma_L, q.eps_L, 2)));
  for (int k = 1; k <= 3; ++k) {
    const auto b = theorem44_bound(q, k);
    REQUIRE(b.has_value());
    CHECK(q.sigma_img[k] <= *b + 1e-9);
    CHECK(*b <= t.x_gamma);
  }

  // A very loose coarsest solve pushes lambda_min(A0_hat^{-1} A_0) below the
  // left endpoint of the admissible interval.
  const auto loose = gs_hierarchy(poisson_2d(15, 15), 3, 2, A0Spec{A0Policy::scaled, 1e3, 0, 0});
  const auto ql = level_quantities(loose);
  const auto tl = theorem42_bound(ql);
  CHECK(ql.a0_lambda_min < tl.left_endpoint);
  CHECK_FALSE(tl.applicable);
}
