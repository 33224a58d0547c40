#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracrk/discretize.hpp"
#include "fracrk/linalg.hpp"

namespace fracrk::poles {

enum class Strategy {
  zolotarev,          // Z: optimal for the interval, not nested
  eds,                // E: equidistributed sequence, nested
  weak_greedy,        // G: residual-driven greedy, needs operator and vector
  spectral_adaptive,  // S: Ritz-aware greedy, needs operator and vector
  automatic,          // A: certificate-driven greedy on the interval
  fully_automatic,    // F: certificate-driven greedy, interval-free
};

char strategy_tag(Strategy s);  // Z E G S A F
Strategy strategy_from_tag(std::string_view tag);

struct PoleSet {
  std::vector<double> poles;  // strictly decreasing, all negative
  Strategy strategy = Strategy::zolotarev;
  // Spectral interval the set was generated for; absent for the
  // fully automatic strategy, which never sees one.
  std::optional<discretize::SpectralInterval> interval;
};

// Sortedness, strict negativity, distinctness; containment in
// [-hi, -lo] when an interval is attached.
void validate(const PoleSet& set);

// The k optimal poles for [lo, hi]: negatives of the Zolotarev nodes
//   Z_j = hi * dn((2(k-j)+1)/(2k) K(d'), d'),   d' = sqrt(1 - (lo/hi)^2).
PoleSet zolotarev(const discretize::SpectralInterval& interval, int k);

// Exact decay rate C* of the optimal max |r|: pi K(mu1) / (4 K(mu)) with
// mu = ((1-sqrt(d))/(1+sqrt(d)))^2, mu1 = sqrt(1-mu^2), d = lo/hi.
double zolotarev_rate(const discretize::SpectralInterval& interval);
// Classical approximation pi^2 / (2 log(4/d)); within a few percent for
// small d.
double zolotarev_rate_asymptotic(const discretize::SpectralInterval& interval);

// Nested equidistributed poles: xi_j = -hi sqrt(t_j) with g(t_j) = frac(j sqrt(2))
// for the elliptic CDF g on [d^2, 1].
PoleSet eds(const discretize::SpectralInterval& interval, int k);

// Log-spaced grid of n >= 2 points covering [lo, hi], endpoints included.
std::vector<double> log_grid(const discretize::SpectralInterval& interval, int n);

struct GreedyOptions {
  // Training grid size; 0 means 100*k.  Must end up >= 10*k.
  int grid_points = 0;
  // Stop early once the residual estimator falls below stop_tol * |b|_M.
  double stop_tol = 1e-13;
  // Use the projected estimator |b - V y|_M instead of the true shifted
  // residual.  Kept for comparison runs; the default is the residual.
  bool projected_estimator = false;
};

// G: grow the pole set by maximising the shifted-system residual over a
// training grid.  May return fewer than k poles if the estimator hits
// the floor first.
PoleSet weak_greedy(const linalg::OperatorPair& op, const linalg::Vector& b,
                    const discretize::SpectralInterval& interval, int k,
                    const GreedyOptions& opts = {});

// S: grow the pole set by maximising prod_j |lambda + xi_j| / |lambda - mu_j|
// over a training grid, with mu_j the Ritz values of the current
// resolvent-image space.  Grid points within 1e-12 of a Ritz value are
// skipped.
PoleSet spectral_adaptive(const linalg::OperatorPair& op, const linalg::Vector& b,
                          const discretize::SpectralInterval& interval, int k,
                          const GreedyOptions& opts = {});

// A: start from the interval endpoints and repeatedly place the next pole
// at the interior extremum of r with the largest magnitude.  k >= 2.
PoleSet auto_poles(const discretize::SpectralInterval& interval, int k);

// F: interval-free variant of A.  Seeds with the Ritz values of the
// two-dimensional Krylov space span{b, Lb} and keeps the running extremal
// Ritz values of the rational Krylov space as surrogate endpoints, which
// compete with the interior extrema for the next pole.  Throws when b is
// an eigenvector (the seed space degenerates).
PoleSet fully_auto_poles(const linalg::OperatorPair& op, const linalg::Vector& b,
                         int k);

// Plain text pole files: '#' comment lines carry optional strategy and
// interval metadata, then one pole per line.
void write_poles(const std::string& path, const PoleSet& set);

struct PoleFile {
  std::vector<double> poles;
  std::optional<Strategy> strategy;
  std::optional<discretize::SpectralInterval> interval;
};

PoleFile read_poles(const std::string& path);

namespace detail {
// CDF of the equilibrium density on [delta^2, 1]; g(delta^2) = 0, g(1) = 1.
double eds_g(double t, double delta);
double eds_g_prime(double t, double delta);
}  // namespace detail

}  // namespace fracrk::poles
