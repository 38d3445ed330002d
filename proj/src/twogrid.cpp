#include "mgbounds/twogrid.hpp"

namespace mgb {

TwoGridSetup make_setup(Operator A, SmootherPair smoother, Prolongation P, Matrix B_c,
                        Index dense_cap) {
  const Index n = A.rows();
  if (!A.square()) throw DimensionError("two-grid setup: A must be square");
  if (smoother.size() != n || P.fine_size() != n) {
    throw DimensionError("two-grid setup: A, M and P dimensions do not conform");
  }
  if (P.coarse_size() >= n) {
    throw PreconditionError("two-grid setup: need n_c < n (P = I is not a coarse space)");
  }
  if (B_c.rows() != P.coarse_size() || B_c.cols() != P.coarse_size()) {
    throw DimensionError("two-grid setup: B_c must be n_c x n_c");
  }
  check_dense_cap(n, dense_cap, "two-grid setup");
  if (!smoother.a_convergent) {
    throw InvariantViolation("two-grid setup: smoother is not A-convergent");
  }
  cholesky(A.dense(), "two-grid setup (A)");
  cholesky(B_c, "two-grid setup (B_c)");
  TwoGridSetup s;
  s.A_c = galerkin(A, P.P).dense();
  s.A = std::move(A);
  s.smoother = std::move(smoother);
  s.P = std::move(P);
  s.B_c = sym(B_c);
  s.dense_cap = dense_cap;
  return s;
}

TwoGridSetup make_exact_setup(Operator A, SmootherPair smoother, Prolongation P,
                              Index dense_cap) {
  Matrix A_c = galerkin(A, P.P).dense();
  return make_setup(std::move(A), std::move(smoother), std::move(P), std::move(A_c),
                    dense_cap);
}

TwoGridOperators assemble(const TwoGridSetup& setup) {
  const Index n = setup.size();
  check_dense_cap(n, setup.dense_cap, "assemble");
  const Matrix& A = setup.A.dense();
  const Matrix& P = setup.P.P.dense();
  const Matrix I = identity(n);

  const Matrix pre = I - smoother_solve(setup.smoother, A);
  const Matrix post = I - smoother_solve_transpose(setup.smoother, A);
  const Matrix PtA = P.transpose() * A;
  const Eigen::LLT<Matrix> ac(setup.A_c);
  const Eigen::LLT<Matrix> bc(setup.B_c);

  TwoGridOperators ops;
  ops.Pi_A = P * ac.solve(PtA);
  ops.E_TG = post * ((I - ops.Pi_A) * pre);
  ops.E_ITG = post * ((I - P * bc.solve(PtA)) * pre);

  const Matrix Mbar_inv = m_bar_inverse(setup.smoother, setup.A);
  const Matrix Y = post * P;
  ops.B_TG_inv = sym(Mbar_inv + Y * ac.solve(Y.transpose()));
  ops.B_ITG_inv = sym(Mbar_inv + Y * bc.solve(Y.transpose()));

  const Matrix& Mt = setup.smoother.M_tilde;
  const Matrix PtMt = P.transpose() * Mt;
  const Eigen::LLT<Matrix> pmp(sym(PtMt * P));
  ops.Pi_Mtilde = P * pmp.solve(PtMt);
  return ops;
}

double conv_factor(const Matrix& E, const Matrix& A, Index dense_cap) {
  if (E.rows() != A.rows() || E.cols() != A.cols()) {
    throw DimensionError("conv_factor: E and A dimensions differ");
  }
  check_dense_cap(A.rows(), dense_cap, "conv_factor");
  const auto llt = cholesky(A, "conv_factor(A)");
  const Matrix Lt = llt.matrixU();
  // X = L^T E L^{-T}
  const Matrix LtE = Lt * E;
  const Matrix X = llt.matrixL().solve(LtE.transpose()).transpose();
  return near_symmetric_norm(X, 1e-8, dense_cap);
}

double k_tg(const Matrix& A, const Matrix& M_tilde, const Matrix& P, Index dense_cap) {
  const Matrix MP = M_tilde * P;
  const Eigen::LLT<Matrix> pmp(sym(P.transpose() * MP));
  const Matrix X = sym(M_tilde - MP * pmp.solve(MP.transpose()));
  return gen_sym_eig(X, A, false, dense_cap).max();
}

Matrix m_tilde_orthogonal_restriction(const Matrix& M_tilde, const Matrix& P) {
  const Matrix PtM = P.transpose() * M_tilde;
  return Eigen::LLT<Matrix>(sym(PtM * P)).solve(PtM);
}

double k_ideal(const Matrix& A, const Matrix& M_tilde, const Matrix& P, const Matrix& R,
               Index dense_cap) {
  const Index nc = P.cols();
  if (R.rows() != nc || R.cols() != P.rows()) {
    throw DimensionError("k_ideal: R must be n_c x n");
  }
  if (max_abs(R * P - identity(nc)) > 1e-10) {
    throw PreconditionError("k_ideal: R P must equal the identity");
  }
  const Matrix C = identity(P.rows()) - P * R;
  const Matrix X = sym(C.transpose() * M_tilde * C);
  return gen_sym_eig(X, A, false, dense_cap).max();
}

Vector twogrid_cycle(const TwoGridSetup& setup, const Vector& f, const Vector& u0) {
  const Operator& A = setup.A;
  const Operator& P = setup.P.P;
  if (f.size() != A.rows() || u0.size() != A.rows()) {
    throw DimensionError("twogrid_cycle: vector sizes do not match A");
  }
  Vector u = u0 + smoother_solve(setup.smoother, Vector(f - A.apply(u0)));
  const Vector rc = P.apply_transpose(f - A.apply(u));
  const Vector ec = Eigen::LLT<Matrix>(setup.B_c).solve(rc);
  u += P.apply(ec);
  u += smoother_solve_transpose(setup.smoother, Vector(f - A.apply(u)));
  return u;
}

}  // namespace mgb
