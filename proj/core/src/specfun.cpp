#include "fracrk/specfun.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fracrk::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_modulus(double k) {
  if (!(k >= 0.0) || k >= 1.0 || !std::isfinite(k))
    throw std::domain_error("specfun: modulus k must satisfy 0 <= k < 1");
}

}  // namespace

double ellip_k(double k) {
  check_modulus(k);
  // AGM(1, k') with k'^2 = (1-k)(1+k) evaluated in factored form so that
  // moduli extremely close to 1 keep full relative accuracy in k'.
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int it = 0; it < 64; ++it) {
    const double an = 0.5 * (a + b);
    const double bn = std::sqrt(a * b);
    a = an;
    b = bn;
    if (std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * a) break;
  }
  return kPi / (2.0 * a);
}

JacobiSnCnDn jacobi_sncndn(double u, double k) {
  check_modulus(k);
  if (k == 0.0) return {std::sin(u), std::cos(u), 1.0};

  const double m = k * k;
  const double kp2 = (1.0 - k) * (1.0 + k);

  // Descending Landen transformation driven by the AGM of (1, k').
  std::vector<double> as, cs;
  double a = 1.0;
  double b = std::sqrt(kp2);
  int n = 0;
  as.push_back(a);
  cs.push_back(0.5 * (a - b));
  while (std::abs(a - b) > 4.0 * std::numeric_limits<double>::epsilon() * a && n < 60) {
    const double an = 0.5 * (a + b);
    const double cn_ = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    ++n;
    as.push_back(a);
    cs.push_back(cn_);
  }

  // Back-recursion for the amplitude: phi_{i-1} = (phi_i + asin(c_i/a_i sin phi_i)) / 2.
  double phi = std::ldexp(as[static_cast<size_t>(n)] * u, n);
  for (int i = n; i >= 1; --i) {
    double t = cs[static_cast<size_t>(i)] / as[static_cast<size_t>(i)] * std::sin(phi);
    t = std::max(-1.0, std::min(1.0, t));
    phi = 0.5 * (std::asin(t) + phi);
  }

  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn^2 = 1 - m sn^2 = k'^2 + m cn^2; the second form has no cancellation.
  const double dn = std::sqrt(kp2 + m * cn * cn);
  return {sn, cn, dn};
}

double jacobi_dn(double u, double k) {
  check_modulus(k);
  if (k == 0.0) return 1.0;
  const double K = ellip_k(k);
  const double kp = std::sqrt((1.0 - k) * (1.0 + k));
  double v = std::abs(u);
  // dn has period 2K and dn(2K - v) = dn(v); fold into [0, K].
  v = std::fmod(v, 2.0 * K);
  if (v > K) v = 2.0 * K - v;
  if (v > 0.5 * K) {
    // dn(v, k) = k' / dn(K - v, k): evaluate dn away from its minimum so
    // values of order k' are produced with full relative accuracy.
    return kp / jacobi_sncndn(K - v, k).dn;
  }
  return jacobi_sncndn(v, k).dn;
}

double gamma_fn(double x) {
  if (!(x > 0.0))
    throw std::domain_error("specfun: gamma_fn requires x > 0");
  return std::tgamma(x);
}

double erfcx(double x) {
  if (!(x >= 0.0))
    throw std::domain_error("specfun: erfcx requires x >= 0");
  if (x >= 26.0) {
    // Asymptotic series erfcx(x) ~ (x sqrt(pi))^{-1} sum_j (-1)^j (2j-1)!! / (2x^2)^j.
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j <= 20; ++j) {
      term *= -(2.0 * j - 1.0) * inv2x2;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum / (x * std::sqrt(kPi));
  }
  // exp(x^2) stays below overflow for x < 26.6 and erfc(x) stays normal.
  return std::exp(x * x) * std::erfc(x);
}

namespace detail {

double sinpi(double y) {
  double r = std::remainder(y, 2.0);  // r in [-1, 1], y = 2n + r exactly
  return std::sin(kPi * r);
}

double rgamma(double y) {
  if (y > 0.5) {
    if (y > 170.0) {
      // 1/Gamma underflows smoothly; evaluate via lgamma to avoid overflow.
      return std::exp(-std::lgamma(y));
    }
    return 1.0 / std::tgamma(y);
  }
  // Reflection: 1/Gamma(y) = Gamma(1-y) sin(pi y) / pi, entire in y.
  const double s = sinpi(y);
  if (s == 0.0) return 0.0;  // nonpositive integer
  const double z = 1.0 - y;
  if (z > 170.0) {
    // |1/Gamma(y)| is astronomically large; signal by returning +-inf so
    // callers treat the corresponding expansion term as divergent.
    return std::copysign(std::numeric_limits<double>::infinity(), s);
  }
  return std::tgamma(z) * s / kPi;
}

double ml_series(double alpha, double beta, double x) {
  if (x == 0.0) return rgamma(beta);
  // sum_k (-x)^k / Gamma(alpha k + beta), compensated accumulation.
  double sum = 0.0, comp = 0.0;
  double last_mag = std::numeric_limits<double>::infinity();
  const int kmax = 4000;
  for (int k = 0; k < kmax; ++k) {
    const double g = alpha * k + beta;
    double term;
    if (g > 170.0) {
      term = (k % 2 == 0 ? 1.0 : -1.0) *
             std::exp(k * std::log(x) - std::lgamma(g));
    } else {
      term = (k % 2 == 0 ? 1.0 : -1.0) * std::pow(x, k) / std::tgamma(g);
    }
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
    const double mag = std::abs(term);
    if (mag < 1e-17 * std::abs(sum + comp) && mag <= last_mag && k > 2) break;
    last_mag = mag;
  }
  return sum + comp;
}

bool ml_asymptotic(double alpha, double beta, double x, double& out) {
  // E_{alpha,beta}(-x) ~ sum_{j>=1} (-1)^{j+1} x^{-j} / Gamma(beta - alpha j).
  // On the negative axis the expansion is purely algebraic for alpha < 1; for
  // alpha = 1 an exponential remainder ~ e^{-x} survives, hence the x >= 40
  // gate.  Individual coefficients vanish whenever beta - alpha j lands on a
  // pole of Gamma, so the divergence check and the acceptance test both look
  // at a two-term envelope rather than a single magnitude: a lone tiny term
  // says nothing about the tail.
  if (x <= 1.0) return false;
  if (alpha == 1.0 && x < 40.0) return false;
  const double lx = std::log(x);
  constexpr int jmax = 64;
  std::array<double, jmax + 1> term{};
  std::array<double, jmax + 1> mag{};
  int n = 0;
  for (int j = 1; j <= jmax; ++j) {
    const double rg = rgamma(beta - alpha * j);
    if (!std::isfinite(rg)) break;
    const double sgn = (j % 2 == 1) ? 1.0 : -1.0;
    term[static_cast<size_t>(j)] = sgn * std::exp(-j * lx) * rg;
    mag[static_cast<size_t>(j)] = std::abs(term[static_cast<size_t>(j)]);
    if (j >= 3) {
      const double env = std::max(mag[static_cast<size_t>(j - 1)],
                                  mag[static_cast<size_t>(j - 2)]);
      if (env > 0.0 && mag[static_cast<size_t>(j)] > env) break;  // divergence onset
    }
    n = j;
  }
  if (n < 3) return false;
  double sum = 0.0;
  for (int j = 1; j + 2 <= n; ++j) {
    sum += term[static_cast<size_t>(j)];
    const double rem = std::max(mag[static_cast<size_t>(j + 1)],
                                mag[static_cast<size_t>(j + 2)]);
    if (sum != 0.0 && rem < 1e-10 * std::abs(sum)) {
      out = sum;
      return true;
    }
  }
  return false;
}

double ml_contour(double alpha, double beta, double x) {
  if (!(alpha < 1.0))
    throw std::domain_error("specfun: ml_contour requires alpha < 1");
  if (!(x > 0.0))
    throw std::domain_error("specfun: ml_contour requires x > 0");
  // E_{alpha,beta}(-x) = (2 pi i)^{-1} int_G e^u u^{alpha-beta} / (u^alpha + x) du
  // on the parabola u = mu (1 + i theta)^2.  For alpha < 1 the integrand is
  // analytic between the parabola and the branch cut, and the preimages of
  // the zeros of u^alpha + x stay outside the unit strip |Im theta| < 1, so
  // the trapezoid rule converges geometrically with rate ~ exp(-2 pi / h).
  constexpr double mu = 6.0;
  constexpr double h = 0.05;
  constexpr int nhalf = 64;  // theta_max = 3.2
  const std::complex<double> I(0.0, 1.0);
  double acc = 0.0;
  for (int m = 0; m <= nhalf; ++m) {
    const double theta = h * m;
    const std::complex<double> w = 1.0 + I * theta;
    const std::complex<double> u = mu * w * w;
    const std::complex<double> du = 2.0 * mu * I * w;
    const std::complex<double> lu = std::log(u);
    const std::complex<double> g =
        std::exp(u + (alpha - beta) * lu) / (std::exp(alpha * lu) + x) * du;
    acc += (m == 0 ? 0.5 : 1.0) * g.imag();
  }
  return acc * h / kPi;
}

namespace {

// Adaptive Simpson for the alpha = 1, non-integer beta branch.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// E_{1,beta}(-x) for beta > 1 via the beta-integral representation
//   E_{1,beta}(-x) = Gamma(beta-1)^{-1} int_0^1 e^{-x(1-w)} w^{beta-2} dw,
// whose integrand is positive (no cancellation at any x).
double ml_alpha1_quadrature(double beta, double x) {
  double integral;
  if (beta >= 2.0) {
    integral = adaptive_simpson(
        [&](double w) { return std::exp(-x * (1.0 - w)) * std::pow(w, beta - 2.0); },
        0.0, 1.0, 1e-14);
  } else {
    // Substitute w = v^p with p = 1/(beta-1) to remove the w^{beta-2}
    // endpoint singularity; the transformed integrand is p e^{-x(1-v^p)}.
    const double p = 1.0 / (beta - 1.0);
    integral = p * adaptive_simpson(
                       [&](double v) { return std::exp(-x * (1.0 - std::pow(v, p))); },
                       0.0, 1.0, 1e-14);
  }
  return integral / std::tgamma(beta - 1.0);
}

double ml_alpha1(double beta, double x) {
  if (beta == 1.0) return std::exp(-x);
  const double nearest = std::round(beta);
  const bool integer_beta = std::abs(beta - nearest) == 0.0 && nearest >= 1.0;
  if (x <= std::max(1.0, beta - 1.0)) return ml_series(1.0, beta, x);
  double asym;
  if (ml_asymptotic(1.0, beta, x, asym)) return asym;
  if (integer_beta) {
    // E_{1,m}(-x) = (e^{-x} - T_{m-2}(-x)) / (-x)^{m-1} with T the Taylor
    // polynomial of the exponential; past x ~ m the difference is dominated
    // by the polynomial tail and no harmful cancellation remains.
    const int m = static_cast<int>(nearest);
    double poly = 0.0, pterm = 1.0;
    for (int j = 0; j <= m - 2; ++j) {
      poly += pterm;
      pterm *= -x / (j + 1.0);
    }
    return (std::exp(-x) - poly) / std::pow(-x, m - 1);
  }
  if (beta > 1.0) return ml_alpha1_quadrature(beta, x);
  // beta < 1: one step of E_{1,beta}(-x) = 1/Gamma(beta) - x E_{1,beta+1}(-x).
  return 1.0 / std::tgamma(beta) - x * ml_alpha1_quadrature(beta + 1.0, x);
}

}  // namespace

}  // namespace detail

double mittag_leffler_neg(const MLParams& p, double x) {
  return mittag_leffler_neg(p.alpha, p.beta, x);
}

double mittag_leffler_neg(double alpha, double beta, double x) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::domain_error("specfun: mittag_leffler_neg requires alpha in (0,1]");
  if (!(beta > 0.0))
    throw std::domain_error("specfun: mittag_leffler_neg requires beta > 0");
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("specfun: mittag_leffler_neg requires finite x >= 0");

  if (x == 0.0) return detail::rgamma(beta);
  if (alpha == 1.0) return detail::ml_alpha1(beta, x);
  // E_{1/2,1}(-x) = e^{x^2} erfc(x), exact for every x >= 0.
  if (alpha == 0.5 && beta == 1.0) return erfcx(x);

  // The Taylor sum is benign for x <= 1; for very small alpha its terms decay
  // so slowly near x = 1 that the contour is the safer route.
  if (x <= 0.5 || (x <= 1.0 && alpha >= 0.05)) return detail::ml_series(alpha, beta, x);
  double asym;
  if (detail::ml_asymptotic(alpha, beta, x, asym)) return asym;
  return detail::ml_contour(alpha, beta, x);
}

}  // namespace fracrk::specfun
