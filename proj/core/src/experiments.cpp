#include "fracrk/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fracrk/certificate.hpp"
#include "fracrk/functions.hpp"
#include "fracrk/linalg.hpp"
#include "fracrk/rkm.hpp"

namespace fracrk::experiments {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int strategy_k_min(poles::Strategy st) {
  // The endpoint-seeded strategies need two poles to start from.
  return (st == poles::Strategy::automatic ||
          st == poles::Strategy::fully_automatic)
             ? 2
             : 1;
}

// Shared read-only state for one sweep: the operator, the interval the
// pole strategies see, the (normalized) sweep vector, and optionally the
// dense eigendecomposition behind the error oracle.
struct Workbench {
  discretize::TestOperator top;
  discretize::SpectralInterval iv;
  linalg::Vector b;
  bool have_eig = false;
  linalg::GeneralizedEig eig;
  linalg::Vector w;  // eig.vectors^T M b
};

constexpr Eigen::Index kOracleLimit = 4096;

Workbench make_workbench(const SweepConfig& cfg, bool need_oracle) {
  validate(cfg);
  Workbench wb;
  if (cfg.operator_kind == "fd2d")
    wb.top = discretize::fd_laplacian_2d(cfg.operator_size);
  else if (cfg.operator_kind == "fem1d")
    wb.top = discretize::fem_p1_1d(cfg.operator_size);
  else
    wb.top = discretize::fem_p1_2d(cfg.operator_size);
  wb.iv = cfg.interval ? *cfg.interval : discretize::spectral_bounds(wb.top);
  const auto& op = wb.top.op;
  wb.b = linalg::Vector::Ones(op.dim());
  wb.b /= linalg::m_norm(op.M, wb.b);
  if (need_oracle) {
    if (op.dim() > kOracleLimit)
      throw std::invalid_argument(
          "experiments: operator too large for the dense error oracle");
    wb.eig = linalg::sym_generalized_eig(op);
    wb.w = wb.eig.vectors.transpose() * (op.M * wb.b);
    wb.have_eig = true;
  }
  return wb;
}

poles::PoleSet make_poles(const Workbench& wb, poles::Strategy st, int k) {
  switch (st) {
    case poles::Strategy::zolotarev:
      return poles::zolotarev(wb.iv, k);
    case poles::Strategy::eds:
      return poles::eds(wb.iv, k);
    case poles::Strategy::weak_greedy:
      return poles::weak_greedy(wb.top.op, wb.b, wb.iv, k);
    case poles::Strategy::spectral_adaptive:
      return poles::spectral_adaptive(wb.top.op, wb.b, wb.iv, k);
    case poles::Strategy::automatic:
      return poles::auto_poles(wb.iv, k);
    case poles::Strategy::fully_automatic:
      return poles::fully_auto_poles(wb.top.op, wb.b, k);
  }
  throw std::logic_error("experiments: unhandled strategy");
}

// Relative M-norm error of the rational Krylov approximation against the
// dense oracle; b is already normalized so no division is needed.
double oracle_error(const Workbench& wb, const functions::ParametricFunction& f,
                    const poles::PoleSet& set) {
  const auto basis = rkm::build_basis(wb.top.op, wb.b, set);
  const linalg::Vector u = rkm::apply_f(basis, f, wb.b);
  linalg::Vector scaled = wb.w;
  for (Eigen::Index i = 0; i < scaled.size(); ++i)
    scaled[i] *= functions::evaluate(f, wb.eig.values[i]);
  const linalg::Vector exact = wb.eig.vectors * scaled;
  return linalg::m_norm(wb.top.op.M, u - exact);
}

// Runs body(0..n-1) on the worker pool; results must be written to
// per-index slots so the output order never depends on scheduling.
void run_jobs(int n, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), std::max(n, 1));
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(err_mu);
        if (err) return;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

functions::ParametricFunction convergence_function(const SweepConfig& cfg) {
  if (cfg.function_kind == "powpos") return functions::PowPos{cfg.s.front()};
  if (cfg.function_kind == "powneg") return functions::PowNeg{cfg.s.front()};
  return functions::MittagLeffler{cfg.alpha.front(), cfg.beta.front(),
                                  cfg.t.front(), cfg.s.front()};
}

std::vector<int> k_list(const SweepConfig& cfg, poles::Strategy st) {
  std::vector<int> ks;
  for (int k = std::max(cfg.k_min, strategy_k_min(st)); k <= cfg.k_max; ++k)
    ks.push_back(k);
  return ks;
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("FRACRK_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1)
      return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(std::min(hc, 16u)) : 1;
}

void validate(const SweepConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("experiments: " + what);
  };
  if (cfg.operator_kind != "fd2d" && cfg.operator_kind != "fem1d" &&
      cfg.operator_kind != "fem2d")
    fail("operator.kind must be fd2d, fem1d, or fem2d");
  if (cfg.operator_size < 2) fail("operator.n must be at least 2");
  if (cfg.function_kind != "ml" && cfg.function_kind != "powpos" &&
      cfg.function_kind != "powneg")
    fail("function.kind must be ml, powpos, or powneg");
  if (cfg.alpha.empty()) fail("grid.alpha must not be empty");
  if (cfg.beta.empty()) fail("grid.beta must not be empty");
  if (cfg.t.empty()) fail("grid.t must not be empty");
  if (cfg.s.empty()) fail("grid.s must not be empty");
  for (double a : cfg.alpha)
    if (!(a >= 0.0 && a <= 1.0)) fail("grid.alpha values must lie in [0, 1]");
  for (double b : cfg.beta) {
    if (!(b > 0.0)) fail("grid.beta values must be positive");
    for (double a : cfg.alpha)
      if (b < a) fail("grid.beta must dominate grid.alpha for the Mittag-Leffler family");
  }
  for (double t : cfg.t)
    if (!(t >= 0.0)) fail("grid.t values must be nonnegative");
  for (double s : cfg.s)
    if (!(s >= 0.0 && s <= 1.0)) fail("grid.s values must lie in [0, 1]");
  if (cfg.strategies.empty()) fail("sweep.strategies must not be empty");
  if (cfg.k_min < 0 || cfg.k_max < cfg.k_min || cfg.k_max > 60)
    fail("sweep k range must satisfy 0 <= kmin <= kmax <= 60");
  if (!(cfg.safety > 0.0)) fail("sweep.safety must be positive");
  if (cfg.interval) {
    if (!(cfg.interval->lo > 0.0 && cfg.interval->hi >= cfg.interval->lo))
      fail("interval must satisfy 0 < lo <= hi");
  }
}

SweepConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("experiments: cannot open config file " + path);
  SweepConfig cfg;
  std::string line, section;
  int line_no = 0;
  std::optional<double> iv_lo, iv_hi;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto parse_double = [&](const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail("not a number: '" + tok + "'");
    return v;
  };
  auto parse_int = [&](const std::string& tok) {
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') fail("not an integer: '" + tok + "'");
    return static_cast<int>(v);
  };
  // Numeric lists: plain values and inclusive first:step:last ranges.
  auto parse_grid = [&](const std::string& value) {
    std::vector<double> out;
    for (const std::string& tok : split_list(value)) {
      const size_t c1 = tok.find(':');
      if (c1 == std::string::npos) {
        out.push_back(parse_double(tok));
        continue;
      }
      const size_t c2 = tok.find(':', c1 + 1);
      if (c2 == std::string::npos || tok.find(':', c2 + 1) != std::string::npos)
        fail("range must be first:step:last, got '" + tok + "'");
      const double first = parse_double(tok.substr(0, c1));
      const double step = parse_double(tok.substr(c1 + 1, c2 - c1 - 1));
      const double last = parse_double(tok.substr(c2 + 1));
      if (!(step > 0.0)) fail("range step must be positive in '" + tok + "'");
      if (last < first) fail("range end below start in '" + tok + "'");
      for (long long i = 0;; ++i) {
        const double v = first + static_cast<double>(i) * step;
        if (v > last + 1e-9 * step) break;
        out.push_back(v);
      }
    }
    if (out.empty()) fail("empty value list");
    return out;
  };
  auto parse_strategies = [&](const std::string& value) {
    std::vector<poles::Strategy> out;
    for (const std::string& tok : split_list(value)) {
      try {
        out.push_back(poles::strategy_from_tag(tok));
      } catch (const std::exception&) {
        fail("sweep.strategies: unknown strategy '" + tok + "'");
      }
    }
    if (out.empty()) fail("sweep.strategies: empty list");
    return out;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "operator" && section != "function" && section != "grid" &&
          section != "sweep" && section != "interval" && section != "output")
        fail("unknown section [" + section + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value.empty()) fail("empty value for key '" + key + "'");
    if (section.empty()) fail("key '" + key + "' outside any section");

    if (section == "operator") {
      if (key == "kind")
        cfg.operator_kind = value;
      else if (key == "n")
        cfg.operator_size = parse_int(value);
      else
        fail("unknown key '" + key + "' in [operator]");
    } else if (section == "function") {
      if (key == "kind")
        cfg.function_kind = value;
      else
        fail("unknown key '" + key + "' in [function]");
    } else if (section == "grid") {
      if (key == "alpha")
        cfg.alpha = parse_grid(value);
      else if (key == "beta")
        cfg.beta = parse_grid(value);
      else if (key == "t")
        cfg.t = parse_grid(value);
      else if (key == "s")
        cfg.s = parse_grid(value);
      else
        fail("unknown key '" + key + "' in [grid]");
    } else if (section == "sweep") {
      if (key == "strategies")
        cfg.strategies = parse_strategies(value);
      else if (key == "kmin")
        cfg.k_min = parse_int(value);
      else if (key == "kmax")
        cfg.k_max = parse_int(value);
      else if (key == "safety")
        cfg.safety = parse_double(value);
      else
        fail("unknown key '" + key + "' in [sweep]");
    } else if (section == "interval") {
      if (key == "lo")
        iv_lo = parse_double(value);
      else if (key == "hi")
        iv_hi = parse_double(value);
      else
        fail("unknown key '" + key + "' in [interval]");
    } else {  // output
      if (key == "path")
        cfg.out_path = value;
      else
        fail("unknown key '" + key + "' in [output]");
    }
  }
  if (iv_lo.has_value() != iv_hi.has_value())
    throw std::runtime_error(path + ": [interval] needs both lo and hi");
  if (iv_lo)
    cfg.interval = discretize::SpectralInterval{*iv_lo, *iv_hi,
                                                discretize::Exactness::analytic};
  validate(cfg);
  return cfg;
}

std::string run_paramstudy(const SweepConfig& cfg) {
  const Workbench wb = make_workbench(cfg, true);
  const poles::Strategy st = cfg.strategies.front();
  const std::vector<int> ks = k_list(cfg, st);
  const double beta = cfg.beta.front();

  // Bases depend only on the pole set, so build one per k up front and
  // share it read-only across the parameter grid.
  std::vector<poles::PoleSet> sets;
  std::vector<rkm::KrylovBasis> bases;
  sets.reserve(ks.size());
  bases.reserve(ks.size());
  for (int k : ks) {
    sets.push_back(make_poles(wb, st, k));
    bases.push_back(rkm::build_basis(wb.top.op, wb.b, sets.back()));
  }

  const int na = static_cast<int>(cfg.alpha.size());
  const int nt = static_cast<int>(cfg.t.size());
  const int ns = static_cast<int>(cfg.s.size());
  const int nk = static_cast<int>(ks.size());
  const int jobs = na * nt * ns * nk;
  std::vector<std::string> rows(static_cast<size_t>(jobs));

  run_jobs(jobs, [&](int idx) {
    const int ik = idx % nk;
    const int is = (idx / nk) % ns;
    const int it = (idx / (nk * ns)) % nt;
    const int ia = idx / (nk * ns * nt);
    const double alpha = cfg.alpha[static_cast<size_t>(ia)];
    const double t = cfg.t[static_cast<size_t>(it)];
    const double s = cfg.s[static_cast<size_t>(is)];
    const functions::ParametricFunction f =
        functions::MittagLeffler{alpha, beta, t, s};

    const linalg::Vector u = rkm::apply_f(bases[static_cast<size_t>(ik)], f, wb.b);
    linalg::Vector scaled = wb.w;
    for (Eigen::Index i = 0; i < scaled.size(); ++i)
      scaled[i] *= functions::evaluate(f, wb.eig.values[i]);
    const double err =
        linalg::m_norm(wb.top.op.M, u - linalg::Vector(wb.eig.vectors * scaled));

    const double reference = functions::evaluate(
        functions::MittagLeffler{alpha, 1.0, t, s}, wb.iv.lo);
    const double bound =
        cfg.safety * certificate::error_bound(f, sets[static_cast<size_t>(ik)].poles,
                                              wb.iv, 1.0, true);
    std::ostringstream row;
    row << fmt(alpha) << ',' << fmt(t) << ',' << fmt(s) << ',' << ks[static_cast<size_t>(ik)]
        << ',' << fmt(err) << ',' << fmt(reference) << ',' << fmt(bound) << '\n';
    rows[static_cast<size_t>(idx)] = row.str();
  });

  std::string csv = "# fracrk csv paramstudy v1\nalpha,t,s,k,E,reference,bound\n";
  for (const std::string& r : rows) csv += r;
  return csv;
}

std::string run_convergence(const SweepConfig& cfg) {
  const Workbench wb = make_workbench(cfg, true);
  const functions::ParametricFunction f = convergence_function(cfg);

  struct Job {
    poles::Strategy st;
    int k;
  };
  std::vector<Job> jobs;
  for (poles::Strategy st : cfg.strategies)
    for (int k : k_list(cfg, st)) jobs.push_back({st, k});
  std::vector<std::string> rows(jobs.size());

  run_jobs(static_cast<int>(jobs.size()), [&](int idx) {
    const Job& job = jobs[static_cast<size_t>(idx)];
    const poles::PoleSet set = make_poles(wb, job.st, job.k);
    const double delta = certificate::certify(set.poles, wb.iv).delta;
    const double err = oracle_error(wb, f, set);
    const double bound =
        cfg.safety * certificate::error_bound(f, set.poles, wb.iv, 1.0, true);
    std::ostringstream row;
    row << poles::strategy_tag(job.st) << ',' << job.k << ',' << fmt(err) << ','
        << fmt(delta) << ',' << fmt(bound) << '\n';
    rows[static_cast<size_t>(idx)] = row.str();
  });

  std::string csv = "# fracrk csv convergence v1\nstrategy,k,E,delta,bound\n";
  for (const std::string& r : rows) csv += r;
  return csv;
}

std::string run_certificates(const SweepConfig& cfg) {
  const Workbench wb = make_workbench(cfg, false);

  struct Job {
    poles::Strategy st;
    int k;
  };
  std::vector<Job> jobs;
  for (poles::Strategy st : cfg.strategies)
    for (int k : k_list(cfg, st)) jobs.push_back({st, k});
  std::vector<std::string> rows(jobs.size());

  run_jobs(static_cast<int>(jobs.size()), [&](int idx) {
    const Job& job = jobs[static_cast<size_t>(idx)];
    const poles::PoleSet set = make_poles(wb, job.st, job.k);
    const double delta = certificate::certify(set.poles, wb.iv).delta;
    std::ostringstream row;
    row << poles::strategy_tag(job.st) << ',' << job.k << ',' << fmt(delta) << '\n';
    rows[static_cast<size_t>(idx)] = row.str();
  });

  std::string csv = "# fracrk csv certificates v1\nstrategy,k,delta\n";
  for (const std::string& r : rows) csv += r;
  return csv;
}

}  // namespace fracrk::experiments
