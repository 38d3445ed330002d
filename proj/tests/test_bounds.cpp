#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>

#include "mgbounds/bounds.hpp"
#include "mgbounds/problems.hpp"
#include "oracles.hpp"

using namespace mgb;

namespace {

TwoGridSetup poisson1d(Index n, const std::function<Matrix(const Matrix&)>& coarse,
                       bool gs = true, double omega = 1.0) {
  const auto A = poisson_1d(n).matrix;
  auto P = geometric_interp_1d(n);
  const Matrix Ac = galerkin(A, P.P).dense();
  return make_setup(A, gs ? gauss_seidel(A) : jacobi(A, omega), std::move(P), coarse(Ac));
}

struct Evaluated {
  TwoGridSetup setup;
  TwoGridOperators ops;
  SpectralQuantities q;
  BoundReport report;
};

Evaluated evaluate(TwoGridSetup s) {
  Evaluated e{std::move(s), {}, {}, {}};
  e.ops = assemble(e.setup);
  e.q = compute_quantities(e.setup, e.ops);
  e.report = evaluate_bounds(e.setup, e.ops, e.q);
  return e;
}

SpectralQuantities synthetic(double r1, double r2) {
  SpectralQuantities q;
  q.r1 = r1;
  q.r2 = r2;
  q.K_TG = 4.0;
  q.lam_min_MA = 0.2;
  q.lam_max_MA = 0.9;
  q.lam_min_plus_MAPi = 0.6;
  return q;
}

}  // namespace

TEST_CASE("classify with ties to the lower case") {
  CHECK(classify(0.5, 0.9) == BoundCase::C1);
  CHECK(classify(0.5, 1.0) == BoundCase::C1);
  CHECK(classify(0.5, 1.0 + 1e-13) == BoundCase::C1);
  CHECK(classify(0.5, 1.5) == BoundCase::C2);
  CHECK(classify(1.0, 1.5) == BoundCase::C2);
  CHECK(classify(1.0 + 1e-13, 1.5) == BoundCase::C2);
  CHECK(classify(1.1, 1.5) == BoundCase::C3);
  CHECK(to_string(BoundCase::C3) == "C3");
}

TEST_CASE("two-sided bound formulas by direct substitution") {
  const auto c1 = theorem32_bounds(synthetic(0.5, 0.8));
  CHECK(c1.case_id == BoundCase::C1);
  CHECK(c1.lower == doctest::Approx(0.75));
  CHECK(c1.upper == doctest::Approx(0.775));
  const auto c2 = theorem32_bounds(synthetic(0.8, 1.5));
  CHECK(c2.case_id == BoundCase::C2);
  CHECK(c2.lower == doctest::Approx(0.725));
  CHECK(c2.upper == doctest::Approx(0.76));
  const auto c3 = theorem32_bounds(synthetic(1.2, 1.5));
  CHECK(c3.case_id == BoundCase::C3);
  CHECK(c3.lower == doctest::Approx(0.725));
  CHECK(c3.upper == doctest::Approx(0.75));
  // Notay: C1 1 - r1/K, C2 max{1 - r1/K, r2 - 1}, C3 max{1 - 1/K, r2 - 1}.
  CHECK(notay_bound(synthetic(0.5, 0.8)) == doctest::Approx(0.875));
  CHECK(notay_bound(synthetic(0.8, 1.5)) == doctest::Approx(0.8));
  CHECK(notay_bound(synthetic(1.2, 1.9)) == doctest::Approx(0.9));
  // Clamping.
  auto q = synthetic(0.5, 0.8);
  q.K_TG = 1.0;
  q.lam_min_MA = 1.0;
  q.lam_max_MA = 1.0;
  CHECK(theorem32_bounds(q).lower >= 0.0);
}

TEST_CASE("fs and improved fs by direct substitution") {
  SpectralQuantities q = synthetic(0.5, 0.8);
  q.theta = 0.0;
  auto fs = fs_bounds(q);
  CHECK(*fs.cond == doctest::Approx(4.0));
  CHECK(*fs.factor == doctest::Approx(0.75));
  auto ifs = improved_fs_bounds(q);
  CHECK(*ifs.cond == doctest::Approx(4.0));
  CHECK(*ifs.factor == doctest::Approx(0.75));

  q.theta = 0.5;
  q.K_TG = 2.0;
  fs = fs_bounds(q);
  CHECK(*fs.cond == doctest::Approx(6.0));
  CHECK(*fs.factor == doctest::Approx(1.0));

  q.theta = 1.0;
  CHECK_FALSE(fs_bounds(q).cond.has_value());
  CHECK_FALSE(improved_fs_bounds(q).factor.has_value());

  // C1 improved: (1+t)K/(1+tK lmin), 1 - (1+tK lmin)/((1+t)K).
  q = synthetic(0.5, 0.8);
  q.theta = 0.25;
  ifs = improved_fs_bounds(q);
  CHECK(*ifs.cond == doctest::Approx(1.25 * 4.0 / 1.2));
  CHECK(*ifs.factor == doctest::Approx(1.0 - 1.2 / 5.0));
  // C2 improved.
  q = synthetic(0.8, 1.5);
  q.theta = 0.25;
  ifs = improved_fs_bounds(q);
  CHECK(*ifs.cond == doctest::Approx((1.0 - 0.15) / 1.2 * 1.25 / 0.75 * 4.0));
  CHECK(*ifs.factor == doctest::Approx(std::max(1.0 - 1.2 / 5.0, 0.25 * 0.4 / 0.75)));
  // C3 improved.
  q = synthetic(1.2, 1.5);
  q.theta = 0.25;
  ifs = improved_fs_bounds(q);
  CHECK(*ifs.cond == doctest::Approx(0.85 * 4.0 / 0.75));
  CHECK(*ifs.factor == doctest::Approx(std::max(0.75, 0.25 * 0.4 / 0.75)));
}

TEST_CASE("compute_quantities: trivial cases") {
  const auto exact = evaluate(poisson1d(15, [](const Matrix& Ac) { return Ac; }));
  CHECK(exact.q.r1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact.q.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact.q.theta <= 1e-12);

  for (double alpha : {0.7, 1.6}) {
    const auto e = evaluate(poisson1d(15, [&](const Matrix& Ac) { return Matrix(alpha * Ac); }));
    CHECK(std::abs(e.q.r1 - 1.0 / alpha) <= 1e-12);
    CHECK(std::abs(e.q.r2 - 1.0 / alpha) <= 1e-12);
    CHECK(std::abs(e.q.theta - std::abs(1.0 - alpha)) <= 1e-12);
  }
}

TEST_CASE("compute_quantities against brute force") {
  const auto e = evaluate(poisson1d(7, [](const Matrix& Ac) { return Matrix(Ac + 0.05 * identity(3)); }));
  const Matrix& A = e.setup.A.dense();
  const Matrix& Mt = e.setup.smoother.M_tilde;
  const Matrix& P = e.setup.P.P.dense();
  const Matrix& Ac = e.setup.A_c;
  const Matrix& Bc = e.setup.B_c;
  const Index n = 7;

  const Vector r = oracle::pencil_eigs(Ac, Bc);
  CHECK(e.q.r1 == doctest::Approx(r(0)).epsilon(1e-10));
  CHECK(e.q.r2 == doctest::Approx(r(2)).epsilon(1e-10));

  const Matrix PiM = P * (P.transpose() * Mt * P).inverse() * P.transpose() * Mt;
  const Vector k = oracle::real_eigs(A.inverse() * Mt * (identity(n) - PiM));
  CHECK(e.q.K_TG == doctest::Approx(k(n - 1)).epsilon(1e-10));

  const Vector ma = oracle::real_eigs(Mt.inverse() * A);
  CHECK(e.q.lam_min_MA == doctest::Approx(ma(0)).epsilon(1e-10));
  CHECK(e.q.lam_max_MA == doctest::Approx(ma(n - 1)).epsilon(1e-10));

  // Nonzero spectrum of M_tilde^{-1} A Pi_A equals that of the reduced pencil
  // (P^T A M_tilde^{-1} A P, A_c).
  const Vector red = oracle::pencil_eigs(P.transpose() * A * Mt.inverse() * A * P, Ac);
  CHECK(e.q.lam_min_plus_MAPi == doctest::Approx(red(0)).epsilon(1e-10));
  const Vector full = oracle::real_eigs(Mt.inverse() * A * P * Ac.inverse() * P.transpose() * A);
  double smallest_positive = 1e300;
  for (Index i = 0; i < full.size(); ++i)
    if (full(i) > 1e-8) smallest_positive = std::min(smallest_positive, full(i));
  CHECK(e.q.lam_min_plus_MAPi == doctest::Approx(smallest_positive).epsilon(1e-9));

  CHECK(e.q.theta == doctest::Approx(oracle::power_norm(identity(3) - Ac.inverse() * Bc)).epsilon(1e-9));
  // theta dominates the pencil deviations of A_c^{-1} B_c.
  const Vector ab = oracle::real_eigs(Ac.inverse() * Bc);
  CHECK(e.q.theta >= std::max(ab(2) - 1.0, 1.0 - ab(0)) - 1e-12);
}

TEST_CASE("lambda_min_plus on a longer Gauss-Seidel setup uses the reduced pencil") {
  const auto e = evaluate(poisson1d(15, [](const Matrix& Ac) { return Ac; }));
  const Matrix& A = e.setup.A.dense();
  const Matrix& Mt = e.setup.smoother.M_tilde;
  const Matrix& P = e.setup.P.P.dense();
  const Vector red = oracle::pencil_eigs(P.transpose() * A * Mt.inverse() * A * P, e.setup.A_c);
  CHECK(e.q.lam_min_plus_MAPi == doctest::Approx(red(0)).epsilon(1e-10));
  CHECK(e.q.lam_min_plus_MAPi > 0.0);
  CHECK(e.q.lam_min_plus_MAPi <= 1.0 + 1e-12);
}

TEST_CASE("projected smoother identities") {
  const auto A = poisson_2d(5, 5).matrix;
  auto P = geometric_interp_2d(5, 5);
  const auto s = make_exact_setup(A, jacobi(A, 0.5), std::move(P));
  const auto ops = assemble(s);
  const auto q = compute_quantities(s, ops);
  const auto direct = lemma31_identities(s.A.dense(), s.smoother.M_tilde, ops.Pi_A);
  const auto formula = lemma31_formula_values(q);
  CHECK(std::abs(direct.min_complement) <= 1e-9);
  CHECK(std::abs(direct.max_complement - (1.0 - 1.0 / q.K_TG)) <= 1e-9);
  CHECK(std::abs(direct.min_range) <= 1e-9);
  CHECK(std::abs(direct.max_range - formula.max_range) <= 1e-9);

  // Brute force on the explicit nonsymmetric products.
  const Index n = 25;
  const Matrix S = identity(n) - s.smoother.M_tilde.inverse() * s.A.dense();
  const Vector c = oracle::real_eigs(S * (identity(n) - ops.Pi_A));
  const Vector r = oracle::real_eigs(S * ops.Pi_A);
  CHECK(std::abs(c(0)) <= 1e-9);
  CHECK(std::abs(c(n - 1) - formula.max_complement) <= 1e-9);
  CHECK(std::abs(r(0)) <= 1e-9);
  CHECK(std::abs(r(n - 1) - formula.max_range) <= 1e-9);
}

TEST_CASE("two-sided bounds: exact case collapses") {
  const auto e = evaluate(poisson1d(15, [](const Matrix& Ac) { return Ac; }));
  CHECK(e.report.exact);
  const double v = 1.0 - 1.0 / e.q.K_TG;
  CHECK(std::abs(e.report.lower - v) <= 1e-9);
  CHECK(std::abs(e.report.upper - v) <= 1e-9);
  CHECK(std::abs(e.report.measured - v) <= 1e-9);
  CHECK(std::abs(e.report.notay_upper - v) <= 1e-9);
  CHECK(std::abs(*e.report.fs.cond - e.q.K_TG) <= 1e-9);
  CHECK(std::abs(*e.report.fs.factor - v) <= 1e-9);
  CHECK(std::abs(e.report.measured_kappa - e.q.K_TG) <= 1e-9);
}

TEST_CASE("two-sided bounds hold in each case") {
  SUBCASE("C1: B_c = 1.5 A_c") {
    const auto e = evaluate(poisson1d(7, [](const Matrix& Ac) { return Matrix(1.5 * Ac); }));
    CHECK(e.report.case_id == BoundCase::C1);
    CHECK(e.report.sandwich_holds());
    CHECK(e.report.upper <= e.report.notay_upper + 1e-12);
    CHECK(e.report.measured == doctest::Approx(oracle::a_norm(e.ops.E_ITG, e.setup.A.dense())).epsilon(1e-9));
  }
  SUBCASE("C2: indefinite perturbation") {
    const auto e = evaluate(poisson1d(15, [](const Matrix& Ac) {
      Matrix B = Ac;
      for (Index i = 0; i < B.rows(); ++i) B(i, i) += (i % 2 ? -0.08 : 0.08);
      return B;
    }));
    CHECK(e.report.case_id == BoundCase::C2);
    CHECK(e.report.sandwich_holds());
    CHECK(e.report.upper <= e.report.notay_upper + 1e-12);
  }
  SUBCASE("C3: B_c = 0.8 A_c, Jacobi") {
    const auto e = evaluate(poisson1d(15, [](const Matrix& Ac) { return Matrix(0.8 * Ac); }, false, 0.6));
    CHECK(e.report.case_id == BoundCase::C3);
    CHECK(e.report.sandwich_holds());
    CHECK(e.report.upper <= e.report.notay_upper + 1e-12);
  }
}

TEST_CASE("alpha limit: B_c = alpha I with alpha -> infinity") {
  const auto e = evaluate(poisson1d(31, [](const Matrix& Ac) {
    return Matrix(1e8 * spectral_norm(Ac) * identity(Ac.rows()));
  }));
  const double target = 1.0 - e.q.lam_min_MA;
  CHECK(e.report.case_id == BoundCase::C1);
  CHECK(std::abs(e.report.lower - target) <= 1e-4);
  CHECK(std::abs(e.report.upper - target) <= 1e-4);
  CHECK(std::abs(e.report.measured - target) <= 1e-4);
  CHECK(e.report.notay_upper >= 1.0 - 1e-6);
  CHECK_FALSE(e.report.fs.cond.has_value());
}

TEST_CASE("improved theta bounds are sharper") {
  SUBCASE("C1: B_c = 1.25 A_c") {
    const auto e = evaluate(poisson1d(7, [](const Matrix& Ac) { return Matrix(1.25 * Ac); }));
    REQUIRE(e.q.theta < 1.0);
    CHECK(*e.report.improved_fs.cond <= *e.report.fs.cond + 1e-12);
    CHECK(*e.report.improved_fs.factor <= *e.report.fs.factor + 1e-12);
    CHECK(e.report.measured_kappa <= *e.report.improved_fs.cond + 1e-9);
  }
  SUBCASE("C3: B_c = 0.8 A_c") {
    const auto e = evaluate(poisson1d(7, [](const Matrix& Ac) { return Matrix(0.8 * Ac); }));
    REQUIRE(e.report.case_id == BoundCase::C3);
    const double theta = e.q.theta;
    const double expect = std::max(1.0 - 1.0 / e.q.K_TG, theta * (1.0 - e.q.lam_min_plus_MAPi) / (1.0 - theta));
    CHECK(*e.report.improved_fs.factor == doctest::Approx(expect));
    CHECK(*e.report.improved_fs.factor <= *e.report.fs.factor + 1e-12);
    CHECK(e.report.measured_kappa <= *e.report.improved_fs.cond + 1e-9);
  }
  SUBCASE("C2") {
    const auto e = evaluate(poisson1d(15, [](const Matrix& Ac) {
      Matrix B = Ac;
      for (Index i = 0; i < B.rows(); ++i) B(i, i) += (i % 2 ? -0.05 : 0.05);
      return B;
    }));
    REQUIRE(e.report.case_id == BoundCase::C2);
    REQUIRE(e.q.theta < 1.0);
    CHECK(*e.report.improved_fs.cond <= *e.report.fs.cond + 1e-12);
    CHECK(*e.report.improved_fs.factor <= *e.report.fs.factor + 1e-12);
    CHECK(e.report.measured_kappa <= *e.report.improved_fs.cond + 1e-9);
  }
}

TEST_CASE("measured_kappa against the explicit product") {
  const auto e = evaluate(poisson1d(15, [](const Matrix& Ac) { return Matrix(1.7 * Ac); }));
  const Vector ev = oracle::real_eigs(e.ops.B_ITG_inv * e.setup.A.dense());
  CHECK(e.report.measured_kappa == doctest::Approx(ev(ev.size() - 1) / ev(0)).epsilon(1e-9));
  CHECK(e.report.measured_kappa >= 1.0);
  // ||E_ITG||_A from the extreme eigenvalues of B_ITG^{-1} A.
  CHECK(e.report.measured == doctest::Approx(std::max(ev(ev.size() - 1) - 1.0, 1.0 - ev(0))).epsilon(1e-9));
}

TEST_CASE("perfect smoother M_tilde = A") {
  // A diagonal, Jacobi with omega = 1, so M = M_tilde = A.
  Vector d(7);
  d << 1, 2, 3, 4, 5, 6, 7;
  const Operator A{Matrix(d.asDiagonal())};
  auto s = make_exact_setup(A, jacobi(A, 1.0), geometric_interp_1d(7));
  const auto ops = assemble(s);
  const auto q = compute_quantities(s, ops);
  CHECK(q.lam_min_plus_MAPi == doctest::Approx(1.0));
  CHECK(q.K_TG == doctest::Approx(1.0));
  CHECK(conv_factor(ops.E_TG, A.dense()) <= 1e-12);
}
