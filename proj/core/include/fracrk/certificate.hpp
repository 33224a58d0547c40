#pragma once

#include <utility>
#include <vector>

#include "fracrk/discretize.hpp"
#include "fracrk/functions.hpp"
#include "fracrk/poles.hpp"

namespace fracrk::certificate {

// Overflow-safe scalar: value = sign * exp(log_abs).  Products of many
// rational factors leave the double range long before k reaches 30, so
// all evaluations of r are carried in this form.
struct LogSignedValue {
  double log_abs;  // -infinity iff sign == 0
  int sign;        // -1, 0, +1

  double value() const;
};

// r(lambda) = prod_j (lambda + xi_j) / (lambda - xi_j) for the pole list
// xi (negative reals, any order).  Exact zero (sign 0) at lambda = -xi_j.
LogSignedValue r_eval(const std::vector<double>& poles, double lambda);

struct RDerivatives {
  double r;
  double r1;
  double r2;
};

// r, r', r'' at lambda > 0 via the leave-one-out identities
//   r'  = -2 sum_j xi_j / (lambda - xi_j)^2 r_{X_j}
//   r'' = -2 sum_j xi_j / (lambda - xi_j)^2 (r_{X_j}' - 2 r_{X_j} / (lambda - xi_j))
// where X_j drops the j-th pole.  Plain doubles suffice: on the positive
// axis every factor has magnitude at most one.
RDerivatives r_derivatives(const std::vector<double>& poles, double lambda);

// The k-1 interior extrema of r: the j-th lies strictly between the
// negatives of consecutive poles.  Guarded Newton per bracket with
// bisection fallback; initial guesses from a 20-point scan.  Poles may be
// passed in any order; locations come back ascending.
std::vector<double> interior_extrema(const std::vector<double>& poles);

struct Certificate {
  double delta;                                    // max |r| over the interval
  std::vector<std::pair<double, double>> extrema;  // (location, |r|), ascending
  discretize::SpectralInterval interval;
};

// Certified sup-norm of r over [lo, hi]: the maximum of |r| at the
// endpoints and the interior extrema.  k = 0 gives 1, k = 1 reduces to
// the endpoint comparison.
Certificate certify(const std::vector<double>& poles,
                    const discretize::SpectralInterval& interval);
Certificate certify(const poles::PoleSet& set);  // requires set.interval

// Derivative-free oracle: log-spaced grid scan (gridpoints >= 1e4) with
// golden-section refinement around every local maximum.
double certify_bruteforce(const std::vector<double>& poles,
                          const discretize::SpectralInterval& interval,
                          int gridpoints = 100000);

// A-priori error bound 2 C c norm_b Delta with C = 1 for symmetric pairs
// and the Crouzeix constant 11.08 otherwise.  The function constant c is
// the smallest applicable one: the uniform-in-s value max(1, 1/lo) for
// negative powers, the evaluation at the right endpoint for positive
// powers, and bound_constant for the Mittag-Leffler family.
double error_bound(const functions::ParametricFunction& f,
                   const std::vector<double>& poles,
                   const discretize::SpectralInterval& interval, double norm_b,
                   bool symmetric);

}  // namespace fracrk::certificate
