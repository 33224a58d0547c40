#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fracrk/functions.hpp"
#include "fracrk/linalg.hpp"
#include "fracrk/poles.hpp"

namespace fracrk::rkm {

// M-orthonormal basis of the rational Krylov space
//   span{ b, (A - xi_1 M)^{-1} M b, ..., (A - xi_k M)^{-1} M b }.
struct KrylovBasis {
  linalg::DenseMatrix V;        // N x m with V^T M V = I
  linalg::DenseMatrix reduced;  // m x m symmetric V^T A V
  poles::PoleSet poles;
  const linalg::OperatorPair* op = nullptr;
  // Directions dropped by the orthonormalization because the space became
  // invariant (m = k + 1 - deflated).
  int deflated = 0;
};

KrylovBasis build_basis(const linalg::OperatorPair& op, const linalg::Vector& b,
                        const poles::PoleSet& poles);

// Eigenvalues of the reduced operator, ascending.  They live inside the
// spectral interval of the pencil (A, M).
std::vector<double> ritz_values(const KrylovBasis& basis);

// u = V f(L_red) V^T M b via the dense eigendecomposition of the reduced
// operator.  The basis must have been built from the same b.
linalg::Vector apply_f(const KrylovBasis& basis,
                       const functions::ParametricFunction& f,
                       const linalg::Vector& b);
linalg::Vector apply_f(const KrylovBasis& basis,
                       const std::function<double(double)>& f,
                       const linalg::Vector& b);

// Dense oracle: f(L)b from the generalized eigendecomposition of (A, M).
// Desk-scale dimensions only.
linalg::Vector exact_apply(const linalg::OperatorPair& op,
                           const functions::ParametricFunction& f,
                           const linalg::Vector& b);
linalg::Vector exact_apply(const linalg::OperatorPair& op,
                           const std::function<double(double)>& f,
                           const linalg::Vector& b);

// Discrete error |f(L)b - u_rkm|_M with b normalized to |b|_M = 1, so the
// value is relative.  k is the approximation degree and must match the
// pole count of the set.
double rkm_error(const linalg::OperatorPair& op,
                 const functions::ParametricFunction& f,
                 const poles::PoleSet& poles, const linalg::Vector& b, int k);

// Polynomial-in-time forcing: (degree, coefficient vector) terms of
// f(tau) = sum_j v_j tau^j, degree <= 6.
using Forcing = std::vector<std::pair<int, linalg::Vector>>;

// Solution of the fractional evolution problem
//   u(t) = E_{alpha,1}(-t^alpha L^s) u0
//        + sum_j Gamma(j+1) t^{alpha+j} E_{alpha,alpha+j+1}(-t^alpha L^s) v_j
// with alpha in (0,1], s in [0,1], t >= 0.  The first overload evaluates
// every term through the dense oracle; the second through the rational
// Krylov approximation on the given pole set (one basis per vector).
linalg::Vector solve_fode(const linalg::OperatorPair& op, const linalg::Vector& u0,
                          const Forcing& forcing, double alpha, double s, double t);
linalg::Vector solve_fode(const linalg::OperatorPair& op, const linalg::Vector& u0,
                          const Forcing& forcing, double alpha, double s, double t,
                          const poles::PoleSet& poles);

}  // namespace fracrk::rkm
