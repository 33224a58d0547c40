#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>
#include "fracrk/certificate.hpp"
#include "fracrk/functions.hpp"
#include "fracrk/poles.hpp"

namespace cert = fracrk::certificate;
namespace fn = fracrk::functions;

namespace {

double relerr(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

fracrk::discretize::SpectralInterval interval(double lo, double hi) {
  return {lo, hi, fracrk::discretize::Exactness::analytic};
}

double logu(std::mt19937& rng, double a, double b) {
  std::uniform_real_distribution<double> u(std::log(a), std::log(b));
  return std::exp(u(rng));
}

// Pole magnitudes in [lo, hi] with a minimum separation ratio, so that the
// brute-force grid cannot miss a bracket.
std::vector<double> random_poles(std::mt19937& rng, double lo, double hi, int k,
                                 double min_ratio = 1.01) {
  for (int attempt = 0; attempt < 2000; ++attempt) {
    std::vector<double> mags(k);
    for (double& m : mags) m = logu(rng, lo, hi);
    std::sort(mags.begin(), mags.end());
    bool ok = true;
    for (int i = 1; i < k; ++i) ok = ok && mags[i] >= mags[i - 1] * min_ratio;
    if (!ok) continue;
    std::vector<double> p(k);
    for (int i = 0; i < k; ++i) p[i] = -mags[i];
    return p;
  }
  REQUIRE(false);
  return {};
}

}  // namespace

TEST_CASE("r_eval hand values and exact zeros") {
  const cert::LogSignedValue one = cert::r_eval({}, 7.0);
  CHECK(one.sign == 1);
  CHECK(one.log_abs == 0.0);
  CHECK(one.value() == 1.0);

  const cert::LogSignedValue third = cert::r_eval({-1.0}, 2.0);
  CHECK(third.sign == 1);
  CHECK(relerr(third.value(), 1.0 / 3.0) < 1e-15);

  const cert::LogSignedValue zero = cert::r_eval({-1.0, -4.0}, 4.0);
  CHECK(zero.sign == 0);
  CHECK(zero.log_abs == -std::numeric_limits<double>::infinity());
  CHECK(zero.value() == 0.0);

  // sign bookkeeping against the raw product for a small set
  const std::vector<double> p = {-0.5, -3.0, -9.0};
  for (double lam : {0.1, 0.7, 2.0, 5.0, 40.0}) {
    double direct = 1.0;
    for (double xi : p) direct *= (lam + xi) / (lam - xi);
    const cert::LogSignedValue v = cert::r_eval(p, lam);
    CHECK(v.sign == ((direct > 0) - (direct < 0)));
    CHECK(std::abs(v.value() - direct) <= 1e-14 * std::abs(direct));
  }
}

TEST_CASE("log-signed form survives products that overflow double") {
  std::vector<double> p(40);
  for (int j = 0; j < 40; ++j) p[j] = -(1.0 + j * 1e-13);
  const double lam = -(1.0 - 1e-8);  // near the cluster on the other side
  const cert::LogSignedValue v = cert::r_eval(p, lam);
  CHECK(std::isfinite(v.log_abs));
  CHECK(v.log_abs > 500.0);  // raw double product would overflow
  CHECK(v.sign != 0);
  long double direct = 0.0L;
  for (double xi : p)
    direct += std::log(std::abs((long double)lam + xi)) -
              std::log(std::abs((long double)lam - xi));
  CHECK(std::abs(v.log_abs - (double)direct) <= 1e-10 * std::abs((double)direct));
}

TEST_CASE("r_derivatives closed form for a single pole") {
  const double xi = -3.0;
  for (double lam : {0.5, 1.0, 2.5, 10.0}) {
    const cert::RDerivatives d = cert::r_derivatives({xi}, lam);
    CHECK(relerr(d.r, (lam + xi) / (lam - xi)) < 1e-15);
    CHECK(relerr(d.r1, -2.0 * xi / ((lam - xi) * (lam - xi))) < 1e-15);
    CHECK(relerr(d.r2, 4.0 * xi / std::pow(lam - xi, 3)) < 1e-15);
  }
  const cert::RDerivatives empty = cert::r_derivatives({}, 2.0);
  CHECK(empty.r == 1.0);
  CHECK(empty.r1 == 0.0);
  CHECK(empty.r2 == 0.0);
}

TEST_CASE("r_derivatives match finite differences at random points") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const double lo = logu(rng, 0.1, 10.0);
    const double hi = lo * logu(rng, 30.0, 3000.0);
    const int k = 2 + static_cast<int>(trial % 9);
    const std::vector<double> p = random_poles(rng, lo, hi, k);
    const double lam = logu(rng, 0.5 * lo, 2.0 * hi);
    const double h = 1e-6 * lam;

    const cert::RDerivatives d = cert::r_derivatives(p, lam);
    const double fd1 = (cert::r_eval(p, lam + h).value() -
                        cert::r_eval(p, lam - h).value()) /
                       (2.0 * h);
    const double scale1 = std::max(std::abs(d.r1), std::abs(d.r) / lam);
    CHECK(std::abs(fd1 - d.r1) <= 1e-6 * scale1);

    const double fd2 = (cert::r_derivatives(p, lam + h).r1 -
                        cert::r_derivatives(p, lam - h).r1) /
                       (2.0 * h);
    const double scale2 = std::max(std::abs(d.r2), std::abs(d.r1) / lam);
    CHECK(std::abs(fd2 - d.r2) <= 1e-5 * scale2);
  }
}

TEST_CASE("r_derivatives at a zero of r") {
  // lambda sits exactly on a pole negative: r = 0, r' has one surviving term
  const std::vector<double> p = {-1.0, -4.0, -9.0};
  const double lam = 4.0;
  const cert::RDerivatives d = cert::r_derivatives(p, lam);
  CHECK(d.r == 0.0);
  // surviving term: -2 xi_2/(lam - xi_2)^2 * r_{without xi_2}(lam)
  const double loo = (4.0 - 1.0) / (4.0 + 1.0) * (4.0 - 9.0) / (4.0 + 9.0);
  CHECK(relerr(d.r1, -2.0 * (-4.0) / 64.0 * loo) < 1e-14);
  // finite differences around the zero for the second derivative
  const double h = 1e-6 * lam;
  const double fd2 = (cert::r_derivatives(p, lam + h).r1 -
                      cert::r_derivatives(p, lam - h).r1) /
                     (2.0 * h);
  CHECK(std::abs(fd2 - d.r2) <= 1e-5 * std::abs(d.r2));
}

TEST_CASE("two-pole extremum sits at the geometric mean") {
  const std::vector<double> ext = cert::interior_extrema({-1.0, -4.0});
  REQUIRE(ext.size() == 1);
  CHECK(std::abs(ext[0] - 2.0) <= 1e-9);
}

TEST_CASE("extrema count, interlacing, and stationarity for random sets") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const double lo = logu(rng, 0.01, 10.0);
    const double hi = lo * logu(rng, 10.0, 1e5);
    const int k = 2 + static_cast<int>(trial % 29);
    const std::vector<double> p = random_poles(rng, lo, hi, k, 1.001);
    const std::vector<double> ext = cert::interior_extrema(p);
    REQUIRE(ext.size() == p.size() - 1);
    std::vector<double> mags;
    for (double xi : p) mags.push_back(-xi);
    std::sort(mags.begin(), mags.end());
    for (std::size_t j = 0; j < ext.size(); ++j) {
      CHECK(ext[j] > mags[j]);
      CHECK(ext[j] < mags[j + 1]);
      const cert::RDerivatives d = cert::r_derivatives(p, ext[j]);
      CHECK(std::abs(d.r1) <= 1e-10 * std::abs(d.r2) * (mags[j + 1] - mags[j]));
    }
  }
}

TEST_CASE("certify endpoint cases") {
  const cert::Certificate empty = cert::certify(std::vector<double>{}, interval(1.0, 4.0));
  CHECK(empty.delta == 1.0);
  CHECK(empty.extrema.empty());

  // symmetric single pole at the geometric mean: both endpoints attain 1/3
  const cert::Certificate one = cert::certify({-2.0}, interval(1.0, 4.0));
  CHECK(relerr(one.delta, 1.0 / 3.0) < 1e-14);
  CHECK(one.extrema.empty());

  // pole exactly at a degenerate interval: deviation collapses to zero
  const cert::Certificate degenerate = cert::certify({-2.0}, interval(2.0, 2.0));
  CHECK(degenerate.delta == 0.0);
}

TEST_CASE("certify rejects bad input") {
  CHECK_THROWS_AS(cert::certify({1.0}, interval(1.0, 4.0)), std::domain_error);
  CHECK_THROWS_AS(cert::certify({-2.0, -2.0}, interval(1.0, 4.0)), std::domain_error);
  CHECK_THROWS_AS(cert::certify({-2.0}, interval(-1.0, 4.0)), std::domain_error);
  CHECK_THROWS_AS(cert::certify_bruteforce({-2.0}, interval(1.0, 4.0), 9999),
                  std::invalid_argument);
}

TEST_CASE("certify agrees with the brute-force oracle") {
  CHECK(cert::certify_bruteforce({}, interval(1.0, 4.0), 10000) == 1.0);
  CHECK(relerr(cert::certify_bruteforce({-2.0}, interval(1.0, 4.0), 10000), 1.0 / 3.0) <
        1e-12);

  std::mt19937 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const double lo = logu(rng, 0.01, 10.0);
    const double hi = lo * logu(rng, 100.0, 1e5);
    const int k = 1 + static_cast<int>(trial * 7 % 20);
    const std::vector<double> p = random_poles(rng, lo, hi, k);
    const double delta = cert::certify(p, interval(lo, hi)).delta;
    const double oracle = cert::certify_bruteforce(p, interval(lo, hi), 100000);
    REQUIRE(delta > 0.0);
    CHECK(std::abs(delta - oracle) <= 1e-8 * delta);
    CHECK(delta < 1.0);
  }
}

TEST_CASE("certify is permutation invariant and scale covariant") {
  std::mt19937 rng(99);
  const double lo = 2.0, hi = 5e3;
  std::vector<double> p = random_poles(rng, lo, hi, 9);
  const double delta = cert::certify(p, interval(lo, hi)).delta;

  std::vector<double> shuffled = p;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(relerr(cert::certify(shuffled, interval(lo, hi)).delta, delta) < 1e-13);

  for (double c : {10.0, 0.1}) {
    std::vector<double> scaled = p;
    for (double& xi : scaled) xi *= c;
    const double ds = cert::certify(scaled, interval(lo * c, hi * c)).delta;
    CHECK(relerr(ds, delta) < 1e-12);
  }
}

TEST_CASE("r stays below one on the interval and at least one on the negative axis") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const double lo = logu(rng, 0.1, 10.0);
    const double hi = lo * logu(rng, 10.0, 1e4);
    const std::vector<double> p = random_poles(rng, lo, hi, 3 + trial);
    for (double lam : fracrk::poles::log_grid(interval(lo, hi), 200)) {
      CHECK(cert::r_eval(p, lam).log_abs < 1e-14);
    }
    // |r(-zeta)| >= 1 for zeta >= 0
    CHECK(cert::r_eval(p, 0.0).log_abs >= -1e-12);
    for (double zeta : fracrk::poles::log_grid(interval(lo * 1e-3, hi * 1e3), 200)) {
      CHECK(cert::r_eval(p, -zeta).log_abs >= -1e-12);
    }
  }
}

TEST_CASE("error bound constants by family") {
  std::mt19937 rng(5);
  const auto iv = interval(1.0, 4.0);
  const std::vector<double> p = random_poles(rng, 1.0, 4.0, 5);
  const double delta = cert::certify(p, iv).delta;
  const double nb = 0.7;

  // uniform negative-power constant: lo >= 1 collapses it to one
  const double bneg = cert::error_bound(fn::PowNeg{0.5}, p, iv, nb, true);
  CHECK(relerr(bneg, 2.0 * delta * nb) < 1e-14);
  const double bneg1 = cert::error_bound(fn::PowNeg{1.0}, p, iv, nb, true);
  CHECK(relerr(bneg1, 2.0 * delta * nb) < 1e-14);
  const auto iv_small = interval(0.5, 4.0);
  const double delta_small = cert::certify(p, iv_small).delta;
  CHECK(relerr(cert::error_bound(fn::PowNeg{0.5}, p, iv_small, nb, true),
               2.0 * 2.0 * delta_small * nb) < 1e-14);

  // positive powers evaluate at the right endpoint, including s = 0, 1
  CHECK(relerr(cert::error_bound(fn::PowPos{0.5}, p, iv, nb, true),
               2.0 * 2.0 * delta * nb) < 1e-14);
  CHECK(relerr(cert::error_bound(fn::PowPos{0.0}, p, iv, nb, true),
               2.0 * delta * nb) < 1e-14);
  CHECK(relerr(cert::error_bound(fn::PowPos{1.0}, p, iv, nb, true),
               2.0 * 4.0 * delta * nb) < 1e-14);

  // Laplace-Stieltjes-only Mittag-Leffler: 8 gamma_k delta norm_b
  const fn::MittagLeffler ml{1.0, 1.0, 1.0, 0.75};
  const double gk = fn::gamma_k(5, iv);
  CHECK(relerr(cert::error_bound(ml, p, iv, nb, true), 8.0 * gk * delta * nb) < 1e-13);

  // nonsymmetric pairs pick up the Crouzeix constant
  CHECK(relerr(cert::error_bound(fn::PowPos{0.5}, p, iv, nb, false),
               2.0 * 11.08 * 2.0 * delta * nb) < 1e-14);

  // degenerate certificate gives a zero bound
  const double bzero = cert::error_bound(fn::PowNeg{0.5}, {-2.0}, interval(2.0, 2.0),
                                         nb, true);
  CHECK(bzero == 0.0);

  CHECK_THROWS_AS(cert::error_bound(fn::PowPos{0.5}, {}, iv, nb, true),
                  std::invalid_argument);
}
