#pragma once

#include <string>
#include <variant>

#include "fracrk/discretize.hpp"

namespace fracrk::functions {

// The parametric function catalog.  All three families are functions of a
// spectral variable lambda > 0 with parameters fixed at construction.

// lambda^s with s in [0, 1].
struct PowPos {
  double s;
  bool operator==(const PowPos&) const = default;
};

// lambda^{-s} with s in [0, 1].
struct PowNeg {
  double s;
  bool operator==(const PowNeg&) const = default;
};

// e_{alpha,beta}(-t^alpha, lambda^s): the Mittag-Leffler kernel
// E_{alpha,beta}(-t^alpha lambda^s) for alpha > 0, and the resolvent
// (1 + lambda^s)^{-1} in the degenerate case alpha = 0 (independent of
// beta and t).  Parameter domain: alpha in [0,1], beta >= max(alpha, eps),
// t >= 0, s in [0,1].
struct MittagLeffler {
  double alpha;
  double beta;
  double t;
  double s;
  bool operator==(const MittagLeffler&) const = default;
};

using ParametricFunction = std::variant<PowPos, PowNeg, MittagLeffler>;

// Throws std::domain_error when a parameter is outside its range.
void validate(const ParametricFunction& f);

// Parse a textual descriptor: "pow:+0.5", "pow:-0.5",
// "ml:alpha=0.5,beta=1,t=1.5,s=0.75" (beta, t, s default to 1).
// Throws std::invalid_argument on malformed input, std::domain_error on
// parameter range violations.
ParametricFunction parse_function(const std::string& descriptor);

// Inverse of parse_function, suitable for logs and CSV columns.
std::string describe(const ParametricFunction& f);

// f(lambda).  Requires lambda > 0 and valid parameters.
double evaluate(const ParametricFunction& f, double lambda);

// Limit of f for lambda -> 0+.  Returns +infinity when unbounded
// (PowNeg with s > 0).
double limit_at_zero(const ParametricFunction& f);

// Structural classification driving the choice of error bound.
struct FunctionClass {
  bool ls = false;  // Laplace-Stieltjes transform of a nonneg. measure
  bool cs = false;  // complete Stieltjes; cs implies ls
  bool cb = false;  // complete Bernstein
};

FunctionClass classify(const ParametricFunction& f);

// Logarithmic factor appearing in the Laplace-Stieltjes error bound:
// gamma_k = 2.23 + (2/pi) ln(4k sqrt(lambda_hi / (lambda_lo pi))).
double gamma_k(int k, const discretize::SpectralInterval& interval);

// Function-dependent constant c_k of the a-priori error bound.  Candidate
// values per class membership: f(lo) when cs, f(hi) when cb, and
// 4 gamma_k f(0+) when ls with bounded f(0+); the smallest applicable
// candidate is returned.  Throws std::domain_error when the only
// applicable branch is ls with unbounded f(0+) (remedy: bound f(. + eta)
// applied to the shifted operator instead), or when no branch applies.
double bound_constant(const ParametricFunction& f, const FunctionClass& cls,
                      const discretize::SpectralInterval& interval, int k);

// Upper bound 2 c_alpha (1/lambda_lo + ln(1 + t^-alpha)/s) for the
// contour integral constant of the Mittag-Leffler kernel.  c_alpha is the
// constant from Podlubny's resolvent inequality, not quantified here and
// therefore supplied by the caller (1 is a common choice).
double laplace_bound(double alpha, double s, double t, double lambda_lo,
                     double c_alpha);

}  // namespace fracrk::functions
