#pragma once

#include "mgbounds/smoothers.hpp"
#include "mgbounds/transfer.hpp"

namespace mgb {

/// (A, M, P, B_c) with the Galerkin A_c = P^T A P. Build through
/// make_setup, which checks every certificate.
struct TwoGridSetup {
  Operator A;
  SmootherPair smoother;
  Prolongation P;
  Matrix B_c;
  Matrix A_c;
  Index dense_cap = kDefaultDenseCap;

  Index size() const { return A.rows(); }
  Index coarse_size() const { return A_c.rows(); }
};

TwoGridSetup make_setup(Operator A, SmootherPair smoother, Prolongation P,
                        Matrix B_c, Index dense_cap = kDefaultDenseCap);

/// Setup with B_c = A_c.
TwoGridSetup make_exact_setup(Operator A, SmootherPair smoother, Prolongation P,
                              Index dense_cap = kDefaultDenseCap);

/// Dense two-grid operators:
///   Pi_A      = P A_c^{-1} P^T A
///   E_TG      = (I - M^{-T}A)(I - Pi_A)(I - M^{-1}A)
///   E_ITG     = (I - M^{-T}A)(I - P B_c^{-1} P^T A)(I - M^{-1}A)
///   B_TG_inv  = M_bar^{-1} + (I - M^{-T}A) P A_c^{-1} P^T (I - A M^{-1})
///   B_ITG_inv = M_bar^{-1} + (I - M^{-T}A) P B_c^{-1} P^T (I - A M^{-1})
///   Pi_Mtilde = P (P^T M_tilde P)^{-1} P^T M_tilde
struct TwoGridOperators {
  Matrix Pi_A;
  Matrix E_TG;
  Matrix E_ITG;
  Matrix B_TG_inv;
  Matrix B_ITG_inv;
  Matrix Pi_Mtilde;
};

TwoGridOperators assemble(const TwoGridSetup& setup);

/// ||E||_A, the 2-norm of L^T E L^{-T} for A = L L^T.
double conv_factor(const Matrix& E, const Matrix& A, Index dense_cap = kDefaultDenseCap);

/// K_TG = lambda_max(A^{-1} M_tilde (I - Pi_Mtilde)).
double k_tg(const Matrix& A, const Matrix& M_tilde, const Matrix& P,
            Index dense_cap = kDefaultDenseCap);

/// K = max_v ||(I - PR)v||^2_{M_tilde} / ||v||^2_A for R with RP = I.
double k_ideal(const Matrix& A, const Matrix& M_tilde, const Matrix& P, const Matrix& R,
               Index dense_cap = kDefaultDenseCap);

/// R = (P^T M_tilde P)^{-1} P^T M_tilde, the choice for which K = K_TG.
Matrix m_tilde_orthogonal_restriction(const Matrix& M_tilde, const Matrix& P);

/// One application of the symmetric two-grid iteration to u0 (matrix-free).
Vector twogrid_cycle(const TwoGridSetup& setup, const Vector& f, const Vector& u0);

}  // namespace mgb
