#pragma once

namespace fracrk::specfun {

// Complete elliptic integral of the first kind K(k), modulus convention
// (not the parameter m = k^2).  Domain 0 <= k < 1.
double ellip_k(double k);

struct JacobiSnCnDn {
  double sn;
  double cn;
  double dn;
};

// Jacobi elliptic functions sn, cn, dn at real argument u with modulus k,
// 0 <= k < 1.  Computed by the descending Landen (AGM) recursion.
JacobiSnCnDn jacobi_sncndn(double u, double k);

// dn(u, k) alone.  For u in the upper half period the reflection
// dn(u,k) = k' / dn(K-u,k) keeps relative accuracy when dn is near k'.
double jacobi_dn(double u, double k);

// Gamma function, domain x > 0.
double gamma_fn(double x);

// Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
double erfcx(double x);

struct MLParams {
  double alpha;  // in (0, 1]
  double beta;   // > 0
};

// Two-parameter Mittag-Leffler function on the negative real axis,
// E_{alpha,beta}(-x) for x >= 0.  Completely monotone when beta >= alpha
// (callers enforce that restriction where they rely on it).
double mittag_leffler_neg(const MLParams& p, double x);
double mittag_leffler_neg(double alpha, double beta, double x);

namespace detail {

// Individual evaluation branches, exposed for cross-validation.
// ml_series: Taylor sum with compensated accumulation, reliable for x <= 1.
// ml_asymptotic: algebraic expansion at infinity; returns false when the
//   requested relative tolerance cannot be certified at this x.
// ml_contour: trapezoid rule on a left-opening parabolic contour for the
//   inverse Laplace transform representation; alpha < 1 only.
double ml_series(double alpha, double beta, double x);
bool ml_asymptotic(double alpha, double beta, double x, double& out);
double ml_contour(double alpha, double beta, double x);

// 1/Gamma(y) as an entire function (zero at nonpositive integers).
double rgamma(double y);

// sin(pi*y) with argument reduction done in exact arithmetic.
double sinpi(double y);

}  // namespace detail

}  // namespace fracrk::specfun
