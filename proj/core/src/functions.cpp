#include "fracrk/functions.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fracrk/specfun.hpp"

namespace fracrk::functions {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void domain_fail(const std::string& what) {
  throw std::domain_error("functions: " + what);
}

void check_exponent(double s) {
  if (!(s >= 0.0 && s <= 1.0)) domain_fail("exponent s must lie in [0, 1]");
}

double checked_lambda(double lambda) {
  if (!(lambda > 0.0)) domain_fail("lambda must be positive");
  return lambda;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

void validate(const ParametricFunction& f) {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, MittagLeffler>) {
          if (!(g.alpha >= 0.0 && g.alpha <= 1.0))
            domain_fail("alpha must lie in [0, 1]");
          if (!(g.beta > 0.0)) domain_fail("beta must be positive");
          if (g.beta < g.alpha) domain_fail("beta must be >= alpha");
          if (!(g.t >= 0.0)) domain_fail("t must be nonnegative");
          check_exponent(g.s);
        } else {
          check_exponent(g.s);
        }
      },
      f);
}

double evaluate(const ParametricFunction& f, double lambda) {
  validate(f);
  checked_lambda(lambda);
  return std::visit(
      [lambda](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PowPos>) {
          return std::pow(lambda, g.s);
        } else if constexpr (std::is_same_v<T, PowNeg>) {
          return std::pow(lambda, -g.s);
        } else {
          const double mu = std::pow(lambda, g.s);
          if (g.alpha == 0.0) return 1.0 / (1.0 + mu);
          return specfun::mittag_leffler_neg(g.alpha, g.beta,
                                             std::pow(g.t, g.alpha) * mu);
        }
      },
      f);
}

double limit_at_zero(const ParametricFunction& f) {
  validate(f);
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PowPos>) {
          return g.s > 0.0 ? 0.0 : 1.0;
        } else if constexpr (std::is_same_v<T, PowNeg>) {
          return g.s > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
        } else {
          // lambda^s -> 1 when s = 0, so the limit is f itself there; the
          // series value 1/Gamma(beta) covers s > 0 (argument -> 0).
          if (g.alpha == 0.0) return g.s > 0.0 ? 1.0 : 0.5;
          if (g.s == 0.0)
            return specfun::mittag_leffler_neg(g.alpha, g.beta,
                                               std::pow(g.t, g.alpha));
          return 1.0 / specfun::gamma_fn(g.beta);
        }
      },
      f);
}

FunctionClass classify(const ParametricFunction& f) {
  validate(f);
  FunctionClass cls;
  std::visit(
      [&cls](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PowPos>) {
          cls.cb = g.s > 0.0 && g.s < 1.0;
        } else if constexpr (std::is_same_v<T, PowNeg>) {
          cls.ls = true;
          cls.cs = g.s > 0.0 && g.s < 1.0;
        } else {
          cls.ls = true;
          cls.cs = g.t > 0.0 && g.s > 0.0 && g.s + 0.5 * g.alpha < 1.0;
        }
      },
      f);
  return cls;
}

double gamma_k(int k, const discretize::SpectralInterval& interval) {
  if (k < 1) throw std::invalid_argument("gamma_k: k must be >= 1");
  if (!(interval.lo > 0.0 && interval.hi >= interval.lo))
    domain_fail("gamma_k: invalid spectral interval");
  const double ratio = interval.hi / (interval.lo * kPi);
  return 2.23 + (2.0 / kPi) * std::log(4.0 * k * std::sqrt(ratio));
}

double bound_constant(const ParametricFunction& f, const FunctionClass& cls,
                      const discretize::SpectralInterval& interval, int k) {
  double best = std::numeric_limits<double>::infinity();
  bool applicable = false;
  if (cls.cs) {
    best = std::min(best, evaluate(f, interval.lo));
    applicable = true;
  }
  if (cls.cb) {
    best = std::min(best, evaluate(f, interval.hi));
    applicable = true;
  }
  if (cls.ls) {
    const double f0 = limit_at_zero(f);
    if (std::isfinite(f0)) {
      best = std::min(best, 4.0 * gamma_k(k, interval) * f0);
      applicable = true;
    } else if (!applicable) {
      domain_fail(
          "bound_constant: f is unbounded at 0+ and only the "
          "Laplace-Stieltjes branch applies; shift the spectrum (bound "
          "f(. + eta) for the operator minus eta times the mass instead)");
    }
  }
  if (!applicable)
    domain_fail("bound_constant: no classification branch applies");
  return best;
}

double laplace_bound(double alpha, double s, double t, double lambda_lo,
                     double c_alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) domain_fail("alpha must lie in (0, 1]");
  if (!(s > 0.0 && s <= 1.0)) domain_fail("s must lie in (0, 1]");
  if (!(t > 0.0)) domain_fail("t must be positive");
  if (!(lambda_lo > 0.0)) domain_fail("lambda_lo must be positive");
  if (!(c_alpha > 0.0)) domain_fail("c_alpha must be positive");
  return 2.0 * c_alpha *
         (1.0 / lambda_lo + std::log1p(std::pow(t, -alpha)) / s);
}

ParametricFunction parse_function(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("function descriptor needs the form "
                                "family:params, got '" + descriptor + "'");
  const std::string family = descriptor.substr(0, colon);
  const std::string params = descriptor.substr(colon + 1);

  ParametricFunction f;
  if (family == "pow") {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
      value = std::stod(params, &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad exponent in '" + descriptor + "'");
    }
    if (consumed != params.size())
      throw std::invalid_argument("bad exponent in '" + descriptor + "'");
    if (std::signbit(value))
      f = PowNeg{-value};
    else
      f = PowPos{value};
  } else if (family == "ml") {
    std::map<std::string, double> kv;
    std::istringstream stream(params);
    std::string item;
    while (std::getline(stream, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("expected key=value in '" + item + "'");
      const std::string key = item.substr(0, eq);
      if (key != "alpha" && key != "beta" && key != "t" && key != "s")
        throw std::invalid_argument("unknown ml parameter '" + key + "'");
      if (kv.count(key))
        throw std::invalid_argument("duplicate ml parameter '" + key + "'");
      std::size_t consumed = 0;
      const std::string digits = item.substr(eq + 1);
      try {
        kv[key] = std::stod(digits, &consumed);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad value for '" + key + "'");
      }
      if (consumed != digits.size())
        throw std::invalid_argument("bad value for '" + key + "'");
    }
    if (!kv.count("alpha"))
      throw std::invalid_argument("ml descriptor requires alpha");
    auto get = [&kv](const char* key, double fallback) {
      const auto it = kv.find(key);
      return it == kv.end() ? fallback : it->second;
    };
    f = MittagLeffler{kv["alpha"], get("beta", 1.0), get("t", 1.0),
                      get("s", 1.0)};
  } else {
    throw std::invalid_argument("unknown function family '" + family + "'");
  }
  validate(f);
  return f;
}

std::string describe(const ParametricFunction& f) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PowPos>) {
          return "pow:+" + format_double(g.s);
        } else if constexpr (std::is_same_v<T, PowNeg>) {
          return "pow:-" + format_double(g.s);
        } else {
          return "ml:alpha=" + format_double(g.alpha) +
                 ",beta=" + format_double(g.beta) + ",t=" + format_double(g.t) +
                 ",s=" + format_double(g.s);
        }
      },
      f);
}

}  // namespace fracrk::functions
