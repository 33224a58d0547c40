#include "fracrk/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

namespace fracrk::certificate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

struct LogFactors {
  std::vector<double> num;      // lambda + xi_j
  std::vector<double> den;      // lambda - xi_j
  std::vector<double> log_mag;  // log |num/den|, -inf at exact zeros
  std::vector<int> sign;
  std::vector<int> zeros;  // indices with num == 0
};

LogFactors factorize(const std::vector<double>& poles, double lambda) {
  LogFactors f;
  const std::size_t k = poles.size();
  f.num.resize(k);
  f.den.resize(k);
  f.log_mag.resize(k);
  f.sign.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    f.num[j] = lambda + poles[j];
    f.den[j] = lambda - poles[j];
    f.sign[j] = sgn(f.num[j]) * sgn(f.den[j]);
    if (f.num[j] == 0.0) {
      f.zeros.push_back(static_cast<int>(j));
      f.log_mag[j] = -kInf;
    } else {
      f.log_mag[j] = std::log(std::abs(f.num[j])) - std::log(std::abs(f.den[j]));
    }
  }
  return f;
}

// Leave-one-out products via prefix/suffix accumulation in log space.
struct LooTable {
  std::vector<double> log_mag;
  std::vector<int> sign;

  double value(std::size_t j) const {
    return sign[j] == 0 ? 0.0 : sign[j] * std::exp(log_mag[j]);
  }
};

LooTable leave_one_out(const LogFactors& f) {
  const std::size_t k = f.log_mag.size();
  std::vector<double> pre(k + 1, 0.0), suf(k + 1, 0.0);
  std::vector<int> pre_s(k + 1, 1), suf_s(k + 1, 1);
  for (std::size_t j = 0; j < k; ++j) {
    pre[j + 1] = pre[j] + f.log_mag[j];
    pre_s[j + 1] = pre_s[j] * f.sign[j];
  }
  for (std::size_t j = k; j > 0; --j) {
    suf[j - 1] = suf[j] + f.log_mag[j - 1];
    suf_s[j - 1] = suf_s[j] * f.sign[j - 1];
  }
  LooTable t;
  t.log_mag.resize(k);
  t.sign.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    t.log_mag[j] = pre[j] + suf[j + 1];
    t.sign[j] = pre_s[j] * suf_s[j + 1];
  }
  return t;
}

std::vector<double> sorted_negatives(const std::vector<double>& poles) {
  std::vector<double> x;
  x.reserve(poles.size());
  for (double p : poles) {
    if (!(p < 0.0)) throw std::domain_error("certificate: poles must be negative");
    x.push_back(-p);
  }
  std::sort(x.begin(), x.end());
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i - 1] == x[i]) throw std::domain_error("certificate: coincident poles");
  return x;
}

double log_abs_r(const std::vector<double>& poles, double lambda) {
  return r_eval(poles, lambda).log_abs;
}

// Locate the unique zero of r' inside (a, b).  s_in is the sign of r on
// the open bracket; r' carries that sign at a+ and the opposite at b-.
double solve_bracket(const std::vector<double>& poles, double a, double b,
                     double init, int s_in) {
  const double width = b - a;
  const double xtol = 1e-13 * b;
  double lo = a, hi = b;
  double lam = init;
  for (int it = 0; it < 80; ++it) {
    const RDerivatives d = r_derivatives(poles, lam);
    if (std::abs(d.r1) <= 1e-10 * std::abs(d.r2) * width) return lam;
    if (d.r1 * s_in > 0.0)
      lo = lam;
    else
      hi = lam;
    double next = (d.r2 != 0.0) ? lam - d.r1 / d.r2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= xtol) return 0.5 * (lo + hi);
    lam = next;
  }
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = r_derivatives(poles, mid).r1;
    if (g == 0.0) return mid;
    if (g * s_in > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Golden-section ascent of log |r| on [a, b]; returns the best value seen.
double golden_max(const std::vector<double>& poles, double a, double b) {
  constexpr double kGolden = 0.6180339887498949;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = log_abs_r(poles, c);
  double fd = log_abs_r(poles, d);
  double best = std::max(fc, fd);
  for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = log_abs_r(poles, d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = log_abs_r(poles, c);
    }
    best = std::max(best, std::max(fc, fd));
  }
  return best;
}

void check_interval(const discretize::SpectralInterval& interval) {
  if (!(interval.lo > 0.0) || !(interval.hi >= interval.lo))
    throw std::domain_error("certificate: interval must satisfy 0 < lo <= hi");
}

}  // namespace

double LogSignedValue::value() const {
  return sign == 0 ? 0.0 : sign * std::exp(log_abs);
}

LogSignedValue r_eval(const std::vector<double>& poles, double lambda) {
  LogSignedValue v{0.0, 1};
  for (double p : poles) {
    const double num = lambda + p;
    const double den = lambda - p;
    if (num == 0.0) return LogSignedValue{-kInf, 0};
    v.sign *= sgn(num) * sgn(den);
    v.log_abs += std::log(std::abs(num)) - std::log(std::abs(den));
  }
  return v;
}

RDerivatives r_derivatives(const std::vector<double>& poles, double lambda) {
  const std::size_t k = poles.size();
  if (k == 0) return {1.0, 0.0, 0.0};
  const LogFactors f = factorize(poles, lambda);

  if (f.zeros.empty()) {
    const LooTable loo = leave_one_out(f);
    double r = (loo.sign[0] == 0) ? 0.0
                                  : loo.sign[0] * f.sign[0] *
                                        std::exp(loo.log_mag[0] + f.log_mag[0]);
    // logarithmic derivative of the full product
    double u = 0.0;
    for (std::size_t i = 0; i < k; ++i) u += 1.0 / f.num[i] - 1.0 / f.den[i];
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double a_j = -2.0 * poles[j] / (f.den[j] * f.den[j]);
      const double loo_j = loo.value(j);
      const double u_j = u - (1.0 / f.num[j] - 1.0 / f.den[j]);
      r1 += a_j * loo_j;
      r2 += a_j * (loo_j * u_j - 2.0 * loo_j / f.den[j]);
    }
    return {r, r1, r2};
  }

  if (f.zeros.size() == 1) {
    const int m = f.zeros[0];
    std::vector<double> reduced(poles);
    reduced.erase(reduced.begin() + m);
    const RDerivatives sub = r_derivatives(reduced, lambda);
    const double a_m = -2.0 * poles[m] / (f.den[m] * f.den[m]);
    // Only the m-th term of each sum survives: every other leave-one-out
    // product retains the vanishing factor.
    const LogFactors fr = factorize(reduced, lambda);
    const LooTable loo_r = leave_one_out(fr);
    double cross = 0.0;
    for (std::size_t i = 0; i < reduced.size(); ++i) {
      const double a_i = -2.0 * reduced[i] / (fr.den[i] * fr.den[i]);
      cross += a_i * loo_r.value(i);
    }
    const double r1 = a_m * sub.r;
    const double r2 = a_m * (sub.r1 - 2.0 * sub.r / f.den[m]) + a_m * cross;
    return {0.0, r1, r2};
  }

  if (f.zeros.size() == 2) {
    // Coincident poles are rejected upstream; kept for completeness.
    const int m1 = f.zeros[0], m2 = f.zeros[1];
    double log_rest = 0.0;
    int sign_rest = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if (static_cast<int>(i) == m1 || static_cast<int>(i) == m2) continue;
      log_rest += f.log_mag[i];
      sign_rest *= f.sign[i];
    }
    const double a1 = -2.0 * poles[m1] / (f.den[m1] * f.den[m1]);
    const double a2 = -2.0 * poles[m2] / (f.den[m2] * f.den[m2]);
    const double rest = sign_rest * std::exp(log_rest);
    return {0.0, 0.0, 2.0 * a1 * a2 * rest};
  }
  return {0.0, 0.0, 0.0};
}

std::vector<double> interior_extrema(const std::vector<double>& poles) {
  const std::vector<double> x = sorted_negatives(poles);
  const std::size_t k = x.size();
  if (k < 2) throw std::domain_error("interior_extrema: need at least two poles");
  std::vector<double> out;
  out.reserve(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double a = x[i], b = x[i + 1];
    // scan for the starting guess and the sign of r inside the bracket
    double best_log = -kInf;
    double init = 0.5 * (a + b);
    int s_in = 0;
    for (int t = 1; t <= 20; ++t) {
      const double lam = a + (b - a) * t / 21.0;
      const LogSignedValue v = r_eval(poles, lam);
      if (v.log_abs > best_log) {
        best_log = v.log_abs;
        init = lam;
        s_in = v.sign;
      }
    }
    out.push_back(solve_bracket(poles, a, b, init, s_in));
  }
  return out;
}

Certificate certify(const std::vector<double>& poles,
                    const discretize::SpectralInterval& interval) {
  check_interval(interval);
  const std::vector<double> x = sorted_negatives(poles);  // validates
  Certificate cert;
  cert.interval = interval;
  double best = std::max(log_abs_r(poles, interval.lo), log_abs_r(poles, interval.hi));
  if (x.size() >= 2) {
    for (double lam : interior_extrema(poles)) {
      if (lam < interval.lo || lam > interval.hi) continue;
      const double v = log_abs_r(poles, lam);
      cert.extrema.emplace_back(lam, std::exp(v));
      best = std::max(best, v);
    }
  }
  cert.delta = std::exp(best);
  return cert;
}

Certificate certify(const poles::PoleSet& set) {
  if (!set.interval)
    throw std::invalid_argument("certify: pole set carries no interval");
  return certify(set.poles, *set.interval);
}

double certify_bruteforce(const std::vector<double>& poles,
                          const discretize::SpectralInterval& interval,
                          int gridpoints) {
  check_interval(interval);
  (void)sorted_negatives(poles);
  if (gridpoints < 10000)
    throw std::invalid_argument("certify_bruteforce: need at least 1e4 grid points");
  const std::vector<double> grid = poles::log_grid(interval, gridpoints);
  const std::size_t n = grid.size();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = log_abs_r(poles, grid[i]);
  double best = *std::max_element(vals.begin(), vals.end());
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = (i == 0) || vals[i] >= vals[i - 1];
    const bool right_ok = (i + 1 == n) || vals[i] >= vals[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double a = grid[i == 0 ? 0 : i - 1];
    const double b = grid[i + 1 == n ? n - 1 : i + 1];
    if (b > a) best = std::max(best, golden_max(poles, a, b));
  }
  return std::exp(best);
}

double error_bound(const functions::ParametricFunction& f,
                   const std::vector<double>& poles,
                   const discretize::SpectralInterval& interval, double norm_b,
                   bool symmetric) {
  if (poles.empty()) throw std::invalid_argument("error_bound: empty pole set");
  if (!(norm_b >= 0.0)) throw std::invalid_argument("error_bound: norm_b must be >= 0");
  functions::validate(f);
  const double C = symmetric ? 1.0 : 11.08;
  const double delta = certify(poles, interval).delta;
  const int k = static_cast<int>(poles.size());
  double c;
  if (std::holds_alternative<functions::PowNeg>(f)) {
    // uniform in the exponent, valid across the whole closed range
    c = std::max(1.0, 1.0 / interval.lo);
  } else if (std::holds_alternative<functions::PowPos>(f)) {
    const functions::FunctionClass cls = functions::classify(f);
    c = cls.cb ? functions::bound_constant(f, cls, interval, k)
               : functions::evaluate(f, interval.hi);
  } else {
    c = functions::bound_constant(f, functions::classify(f), interval, k);
  }
  return 2.0 * C * c * norm_b * delta;
}

}  // namespace fracrk::certificate
