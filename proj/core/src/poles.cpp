#include "fracrk/poles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "fracrk/certificate.hpp"
#include "fracrk/specfun.hpp"

namespace fracrk::poles {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_interval(const discretize::SpectralInterval& interval) {
  if (!(interval.lo > 0.0) || !(interval.hi >= interval.lo))
    throw std::domain_error("poles: interval must satisfy 0 < lo <= hi");
}

void check_k(int k) {
  if (k < 1) throw std::invalid_argument("poles: k must be >= 1");
}

// ---------------------------------------------------------------- quadrature

struct GlRule {
  std::array<double, 64> x;  // nodes on (-1, 1)
  std::array<double, 64> w;
};

const GlRule& gl64() {
  static const GlRule rule = [] {
    GlRule r{};
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r.x[i] = x;
      r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

template <typename F>
double gl_panel(const F& f, double a, double b) {
  const GlRule& r = gl64();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 64; ++i) sum += r.w[i] * f(mid + half * r.x[i]);
  return half * sum;
}

// ----------------------------------------------------------------------- EDS

double eds_g_impl(double t, double delta) {
  const double d2 = delta * delta;
  if (t <= d2) return 0.0;
  if (t >= 1.0) return 1.0;
  const double dprime = std::sqrt((1.0 - delta) * (1.0 + delta));
  const double M = specfun::ellip_k(dprime);
  const double tmid = 0.5 * (d2 + 1.0);
  if (t <= tmid) {
    // y = d2 + (t-d2) sin^2(theta) removes the left endpoint singularity.
    const double span = t - d2;
    auto f = [&](double th) {
      const double s = std::sin(th);
      const double y = d2 + span * s * s;
      return std::cos(th) / std::sqrt(y * (1.0 - y));
    };
    // Panels graded away from theta = 0 resolve the sqrt(y) layer of
    // width ~ delta/sqrt(span) that appears for small delta.
    const double eta = std::min(0.5 * kPi, delta / std::sqrt(span));
    double total = gl_panel(f, 0.0, eta);
    double a = eta;
    while (a < 0.5 * kPi) {
      const double b = std::min(4.0 * a, 0.5 * kPi);
      total += gl_panel(f, a, b);
      a = b;
    }
    return std::sqrt(span) * total / M;
  }
  // Mirrored form for t near 1: y = 1 - (1-t) sin^2(phi).  The remaining
  // integrand is singularity-free because t > (d2+1)/2 keeps y away
  // from d2.
  const double span = 1.0 - t;
  auto f = [&](double ph) {
    const double s = std::sin(ph);
    const double y = 1.0 - span * s * s;
    return std::cos(ph) / std::sqrt((y - d2) * y);
  };
  return 1.0 - std::sqrt(span) * gl_panel(f, 0.0, 0.5 * kPi) / M;
}

double eds_g_prime_impl(double t, double delta) {
  const double d2 = delta * delta;
  if (!(t > d2 && t < 1.0))
    throw std::domain_error("eds_g_prime: t outside (delta^2, 1)");
  const double M = specfun::ellip_k(std::sqrt((1.0 - delta) * (1.0 + delta)));
  return 0.5 / (M * std::sqrt((t - d2) * t * (1.0 - t)));
}

double eds_root(double s_target, double delta) {
  const double d2 = delta * delta;
  double lo = d2, hi = 1.0;
  double t = 0.5 * (d2 + 1.0);
  for (int it = 0; it < 80; ++it) {
    const double g = eds_g_impl(t, delta) - s_target;
    if (std::abs(g) <= 1e-14) return t;
    if (g > 0.0)
      hi = t;
    else
      lo = t;
    double next = t - g / eds_g_prime_impl(t, delta);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15) return 0.5 * (lo + hi);
    t = next;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eds_g_impl(mid, delta) - s_target > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  if (hi - lo > 1e-13)
    throw std::runtime_error("eds: root finder failed to converge");
  return 0.5 * (lo + hi);
}

// ------------------------------------------------------- operator utilities

class MassSolver {
 public:
  explicit MassSolver(const linalg::OperatorPair& op) : op_(op) {
    if (!op.identity_mass) {
      llt_.compute(op.M);
      if (llt_.info() != Eigen::Success)
        throw std::runtime_error("poles: mass matrix factorization failed");
    }
  }

  linalg::Vector solve(const linalg::Vector& rhs) const {
    return op_.identity_mass ? rhs : linalg::Vector(llt_.solve(rhs));
  }

 private:
  const linalg::OperatorPair& op_;
  Eigen::SimplicialLLT<linalg::SparseMatrix> llt_;
};

struct ReducedSpace {
  linalg::DenseMatrix V;    // M-orthonormal columns
  linalg::DenseMatrix AV;   // A * V
  linalg::DenseMatrix L;    // V^T A V, symmetrized
};

ReducedSpace reduce(const linalg::OperatorPair& op,
                    const std::vector<linalg::Vector>& raw) {
  ReducedSpace r;
  r.V = linalg::mgs_m_orthonormalize(raw, op.M).V;
  r.AV = op.A * r.V;
  linalg::DenseMatrix L = r.V.transpose() * r.AV;
  r.L = 0.5 * (L + L.transpose());
  return r;
}

double checked_bnorm(const linalg::OperatorPair& op, const linalg::Vector& b) {
  if (b.size() != op.dim())
    throw std::invalid_argument("poles: vector size does not match operator");
  const double nb = linalg::m_norm(op.M, b);
  if (!(nb > 0.0)) throw std::invalid_argument("poles: b must be nonzero");
  return nb;
}

int resolve_grid_size(const GreedyOptions& opts, int k) {
  const int n = opts.grid_points > 0 ? opts.grid_points : 100 * k;
  if (n < 10 * k)
    throw std::invalid_argument("poles: training grid needs at least 10k points");
  return std::max(n, 2);
}

std::vector<double> sorted_descending(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

}  // namespace

char strategy_tag(Strategy s) {
  switch (s) {
    case Strategy::zolotarev: return 'Z';
    case Strategy::eds: return 'E';
    case Strategy::weak_greedy: return 'G';
    case Strategy::spectral_adaptive: return 'S';
    case Strategy::automatic: return 'A';
    case Strategy::fully_automatic: return 'F';
  }
  throw std::logic_error("strategy_tag: unreachable");
}

Strategy strategy_from_tag(std::string_view tag) {
  if (tag.size() == 1) {
    switch (tag[0]) {
      case 'Z': case 'z': return Strategy::zolotarev;
      case 'E': case 'e': return Strategy::eds;
      case 'G': case 'g': return Strategy::weak_greedy;
      case 'S': case 's': return Strategy::spectral_adaptive;
      case 'A': case 'a': return Strategy::automatic;
      case 'F': case 'f': return Strategy::fully_automatic;
      default: break;
    }
  }
  throw std::invalid_argument("unknown pole strategy tag: " + std::string(tag));
}

void validate(const PoleSet& set) {
  for (std::size_t i = 0; i < set.poles.size(); ++i) {
    if (!(set.poles[i] < 0.0))
      throw std::domain_error("PoleSet: poles must be negative");
    if (i > 0 && !(set.poles[i] < set.poles[i - 1]))
      throw std::domain_error("PoleSet: poles must be strictly decreasing");
  }
  if (set.interval) {
    check_interval(*set.interval);
    for (double p : set.poles)
      if (p < -set.interval->hi || p > -set.interval->lo)
        throw std::domain_error("PoleSet: pole outside [-hi, -lo]");
  }
}

std::vector<double> log_grid(const discretize::SpectralInterval& interval, int n) {
  check_interval(interval);
  if (n < 2) throw std::invalid_argument("log_grid: need at least 2 points");
  std::vector<double> g(n);
  const double llo = std::log(interval.lo);
  const double lhi = std::log(interval.hi);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(llo + (lhi - llo) * i / (n - 1.0));
  g.front() = interval.lo;
  g.back() = interval.hi;
  return g;
}

PoleSet zolotarev(const discretize::SpectralInterval& interval, int k) {
  check_interval(interval);
  check_k(k);
  PoleSet set;
  set.strategy = Strategy::zolotarev;
  set.interval = interval;
  if (interval.lo == interval.hi) {
    if (k != 1)
      throw std::domain_error("zolotarev: degenerate interval admits only k = 1");
    set.poles = {-interval.lo};
    return set;
  }
  const double delta = interval.lo / interval.hi;
  const double dprime = std::sqrt((1.0 - delta) * (1.0 + delta));
  const double K = specfun::ellip_k(dprime);
  set.poles.reserve(k);
  for (int j = 1; j <= k; ++j) {
    const double u = (2.0 * (k - j) + 1.0) / (2.0 * k) * K;
    set.poles.push_back(-interval.hi * specfun::jacobi_dn(u, dprime));
  }
  validate(set);
  return set;
}

namespace {

double agm(double a, double g) {
  for (int i = 0; i < 60 && std::abs(a - g) > 1e-17 * a; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return 0.5 * (a + g);
}

}  // namespace

double zolotarev_rate(const discretize::SpectralInterval& interval) {
  check_interval(interval);
  if (!(interval.lo < interval.hi))
    throw std::domain_error("zolotarev_rate: interval must have lo < hi");
  const double rt = std::sqrt(interval.lo / interval.hi);
  const double mu = std::pow((1.0 - rt) / (1.0 + rt), 2);
  // 1 - mu without cancellation for rt near 0
  const double one_minus_mu = 4.0 * rt / ((1.0 + rt) * (1.0 + rt));
  const double mu1 = std::sqrt(one_minus_mu * (1.0 + mu));
  // K(mu1)/K(mu) via K(m) = pi / (2 agm(1, m')).  The complement of each
  // modulus is the other one and both are known exactly, so the ratio stays
  // accurate even when mu or mu1 rounds to 1 (very tight or very wide
  // intervals), where evaluating K at the rounded modulus would blow up.
  return 0.25 * kPi * agm(1.0, mu1) / agm(1.0, mu);
}

double zolotarev_rate_asymptotic(const discretize::SpectralInterval& interval) {
  check_interval(interval);
  if (!(interval.lo < interval.hi))
    throw std::domain_error("zolotarev_rate_asymptotic: interval must have lo < hi");
  return kPi * kPi / (2.0 * std::log(4.0 * interval.hi / interval.lo));
}

PoleSet eds(const discretize::SpectralInterval& interval, int k) {
  check_interval(interval);
  check_k(k);
  PoleSet set;
  set.strategy = Strategy::eds;
  set.interval = interval;
  if (interval.lo == interval.hi) {
    if (k != 1)
      throw std::domain_error("eds: degenerate interval admits only k = 1");
    set.poles = {-interval.lo};
    return set;
  }
  const double delta = interval.lo / interval.hi;
  const double sqrt2 = std::sqrt(2.0);
  set.poles.reserve(k);
  for (int j = 1; j <= k; ++j) {
    const double sj = j * sqrt2 - std::floor(j * sqrt2);
    const double tj = eds_root(sj, delta);
    set.poles.push_back(-interval.hi * std::sqrt(tj));
  }
  set.poles = sorted_descending(std::move(set.poles));
  validate(set);
  return set;
}

PoleSet weak_greedy(const linalg::OperatorPair& op, const linalg::Vector& b,
                    const discretize::SpectralInterval& interval, int k,
                    const GreedyOptions& opts) {
  check_interval(interval);
  check_k(k);
  const double norm_b = checked_bnorm(op, b);
  const std::vector<double> grid = log_grid(interval, resolve_grid_size(opts, k));
  const MassSolver mass(op);
  const linalg::Vector Mb = op.identity_mass ? b : linalg::Vector(op.M * b);

  std::vector<double> selected;
  std::vector<linalg::Vector> raw;
  raw.push_back(b);
  while (static_cast<int>(selected.size()) < k) {
    const ReducedSpace red = reduce(op, raw);
    const Eigen::Index m = red.V.cols();
    // Lifted defect d = zeta V y + W y - b with W = M^{-1} A V.  Assembled
    // as a vector rather than through Gram blocks: the Gram form cancels
    // O(1) inner products and floors the estimator near sqrt(eps), which
    // would mask saturation and let the argmax wander over roundoff.
    linalg::DenseMatrix W(b.size(), m);
    for (Eigen::Index j = 0; j < m; ++j) W.col(j) = mass.solve(red.AV.col(j));
    const linalg::Vector c = red.V.transpose() * Mb;

    double best_val = -1.0;
    double best_zeta = 0.0;
    for (double zeta : grid) {
      // A shift that is already a pole adds nothing to the space; the
      // projected estimator in particular would happily re-select it.
      bool taken = false;
      for (double p : selected) taken = taken || (p == -zeta);
      if (taken) continue;
      linalg::DenseMatrix shifted = red.L;
      shifted.diagonal().array() += zeta;
      const linalg::Vector y = shifted.llt().solve(c);
      double est;
      if (opts.projected_estimator) {
        est = linalg::m_norm(op.M, b - red.V * y);
      } else {
        const linalg::Vector d = zeta * (red.V * y) + W * y - b;
        est = linalg::m_norm(op.M, d);
      }
      if (est > best_val) {
        best_val = est;
        best_zeta = zeta;
      }
    }
    if (best_val <= opts.stop_tol * norm_b) break;  // space is saturated
    selected.push_back(-best_zeta);
    raw.push_back(linalg::solve_shifted(op, -best_zeta, Mb));
  }

  PoleSet set;
  set.strategy = Strategy::weak_greedy;
  set.interval = interval;
  set.poles = sorted_descending(std::move(selected));
  validate(set);
  return set;
}

PoleSet spectral_adaptive(const linalg::OperatorPair& op, const linalg::Vector& b,
                          const discretize::SpectralInterval& interval, int k,
                          const GreedyOptions& opts) {
  check_interval(interval);
  check_k(k);
  checked_bnorm(op, b);
  const std::vector<double> grid = log_grid(interval, resolve_grid_size(opts, k));
  const linalg::Vector Mb = op.identity_mass ? b : linalg::Vector(op.M * b);

  std::vector<double> selected = {-interval.lo};
  std::vector<linalg::Vector> raw;  // resolvent images only, no b
  raw.push_back(linalg::solve_shifted(op, selected[0], Mb));
  while (static_cast<int>(selected.size()) < k) {
    const ReducedSpace red = reduce(op, raw);
    const linalg::Vector ritz = linalg::dense_sym_eig(red.L).values;
    double best_val = -kInf;
    double best_lam = 0.0;
    bool found = false;
    for (double lam : grid) {
      bool near_ritz = false;
      for (Eigen::Index i = 0; i < ritz.size(); ++i) {
        if (std::abs(lam - ritz[i]) <= 1e-12 * std::max(lam, ritz[i])) {
          near_ritz = true;
          break;
        }
      }
      if (near_ritz) continue;
      double obj = 0.0;
      for (double xi : selected) obj += std::log(std::abs(lam + xi));
      for (Eigen::Index i = 0; i < ritz.size(); ++i)
        obj -= std::log(std::abs(lam - ritz[i]));
      if (obj > best_val) {
        best_val = obj;
        best_lam = lam;
        found = true;
      }
    }
    if (!found || best_val == -kInf) break;
    selected.push_back(-best_lam);
    raw.push_back(linalg::solve_shifted(op, -best_lam, Mb));
  }

  PoleSet set;
  set.strategy = Strategy::spectral_adaptive;
  set.interval = interval;
  set.poles = sorted_descending(std::move(selected));
  validate(set);
  return set;
}

PoleSet auto_poles(const discretize::SpectralInterval& interval, int k) {
  check_interval(interval);
  if (k < 2) throw std::invalid_argument("auto_poles: k must be >= 2");
  if (!(interval.lo < interval.hi))
    throw std::domain_error("auto_poles: interval must have lo < hi");
  std::vector<double> ps = {-interval.lo, -interval.hi};
  while (static_cast<int>(ps.size()) < k) {
    const std::vector<double> ext = certificate::interior_extrema(ps);
    double best_log = -kInf;
    double best_lam = ext.front();
    for (double lam : ext) {
      const double v = certificate::r_eval(ps, lam).log_abs;
      if (v > best_log) {  // ties keep the smallest location
        best_log = v;
        best_lam = lam;
      }
    }
    ps.push_back(-best_lam);
    ps = sorted_descending(std::move(ps));
  }
  PoleSet set;
  set.strategy = Strategy::automatic;
  set.interval = interval;
  set.poles = std::move(ps);
  validate(set);
  return set;
}

PoleSet fully_auto_poles(const linalg::OperatorPair& op, const linalg::Vector& b,
                         int k) {
  if (k < 2) throw std::invalid_argument("fully_auto_poles: k must be >= 2");
  checked_bnorm(op, b);
  const MassSolver mass(op);
  const linalg::Vector Mb = op.identity_mass ? b : linalg::Vector(op.M * b);
  const linalg::Vector Lb = mass.solve(op.A * b);

  std::vector<linalg::Vector> seed = {b, Lb};
  if (linalg::mgs_m_orthonormalize(seed, op.M).retained < 2)
    throw std::runtime_error(
        "fully_auto_poles: span{b, Lb} is one-dimensional (b is an eigenvector)");
  const ReducedSpace seed_red = reduce(op, seed);
  const linalg::Vector seed_ritz = linalg::dense_sym_eig(seed_red.L).values;
  double mu_lo = seed_ritz[0];
  double mu_hi = seed_ritz[seed_ritz.size() - 1];

  std::vector<double> ps = {-mu_lo, -mu_hi};
  std::vector<linalg::Vector> raw = {b};
  raw.push_back(linalg::solve_shifted(op, ps[0], Mb));
  raw.push_back(linalg::solve_shifted(op, ps[1], Mb));
  while (static_cast<int>(ps.size()) < k) {
    std::vector<double> candidates = {mu_lo};
    const std::vector<double> ext = certificate::interior_extrema(ps);
    candidates.insert(candidates.end(), ext.begin(), ext.end());
    candidates.push_back(mu_hi);
    double best_log = -kInf;
    double best_lam = candidates.front();
    for (double lam : candidates) {
      const double v = certificate::r_eval(ps, lam).log_abs;
      if (v > best_log) {
        best_log = v;
        best_lam = lam;
      }
    }
    ps.push_back(-best_lam);
    ps = sorted_descending(std::move(ps));
    raw.push_back(linalg::solve_shifted(op, -best_lam, Mb));
    const ReducedSpace red = reduce(op, raw);
    const linalg::Vector ritz = linalg::dense_sym_eig(red.L).values;
    mu_lo = ritz[0];
    mu_hi = ritz[ritz.size() - 1];
  }

  PoleSet set;
  set.strategy = Strategy::fully_automatic;
  set.poles = std::move(ps);
  validate(set);
  return set;
}

void write_poles(const std::string& path, const PoleSet& set) {
  validate(set);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_poles: cannot open " + path);
  out << std::setprecision(17);
  out << "# fracrk poles\n";
  out << "# strategy: " << strategy_tag(set.strategy) << "\n";
  if (set.interval) {
    out << "# interval: " << set.interval->lo << ' ' << set.interval->hi << ' '
        << (set.interval->exactness == discretize::Exactness::analytic
                ? "analytic"
                : "estimated")
        << "\n";
  }
  for (double p : set.poles) out << p << "\n";
  if (!out) throw std::runtime_error("write_poles: write failed for " + path);
}

PoleFile read_poles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_poles: cannot open " + path);
  PoleFile file;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string head;
    if (!(ss >> head)) continue;  // blank line
    if (head[0] == '#') {
      std::string key;
      if (head == "#") {
        if (!(ss >> key)) continue;
      } else {
        key = head.substr(1);
      }
      if (key == "strategy:") {
        std::string tag;
        if (!(ss >> tag))
          throw std::runtime_error("read_poles: missing strategy tag at line " +
                                   std::to_string(lineno));
        file.strategy = strategy_from_tag(tag);
      } else if (key == "interval:") {
        discretize::SpectralInterval iv;
        if (!(ss >> iv.lo >> iv.hi))
          throw std::runtime_error("read_poles: malformed interval at line " +
                                   std::to_string(lineno));
        std::string exactness;
        if (ss >> exactness)
          iv.exactness = exactness == "analytic" ? discretize::Exactness::analytic
                                                 : discretize::Exactness::estimated;
        file.interval = iv;
      }
      continue;  // other comments are free-form
    }
    try {
      std::size_t pos = 0;
      const double p = std::stod(line, &pos);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
        ++pos;
      if (pos != line.size()) throw std::invalid_argument("trailing characters");
      file.poles.push_back(p);
    } catch (const std::exception&) {
      throw std::runtime_error("read_poles: malformed pole at line " +
                               std::to_string(lineno));
    }
  }
  return file;
}

namespace detail {

double eds_g(double t, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("eds_g: delta must lie in (0, 1)");
  return eds_g_impl(t, delta);
}

double eds_g_prime(double t, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("eds_g_prime: delta must lie in (0, 1)");
  return eds_g_prime_impl(t, delta);
}

}  // namespace detail

}  // namespace fracrk::poles
