#include "fracrk/discretize.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracrk::discretize {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Triplets = std::vector<Eigen::Triplet<double>>;

linalg::SparseMatrix from_triplets(Eigen::Index n, const Triplets& t) {
  linalg::SparseMatrix S(n, n);
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

}  // namespace

TestOperator fd_laplacian_2d(int n) {
  if (n < 2) throw std::invalid_argument("fd_laplacian_2d: need n >= 2");
  const double h = 1.0 / (n + 1);
  const double d = 4.0 / (h * h);
  const double off = -1.0 / (h * h);
  const Eigen::Index N = Eigen::Index(n) * n;
  Triplets t;
  t.reserve(static_cast<size_t>(5 * N));
  auto idx = [n](int i, int j) { return Eigen::Index(j) * n + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index row = idx(i, j);
      t.emplace_back(row, row, d);
      if (i > 0) t.emplace_back(row, idx(i - 1, j), off);
      if (i + 1 < n) t.emplace_back(row, idx(i + 1, j), off);
      if (j > 0) t.emplace_back(row, idx(i, j - 1), off);
      if (j + 1 < n) t.emplace_back(row, idx(i, j + 1), off);
    }
  }
  TestOperator top;
  top.op = {from_triplets(N, t), linalg::sparse_identity(N), true};
  top.name = "fd2d:" + std::to_string(n);
  top.has_analytic = true;
  const double s1 = std::sin(kPi * h / 2.0);
  const double sn = std::sin(n * kPi * h / 2.0);
  top.analytic_lo = 8.0 / (h * h) * s1 * s1;
  top.analytic_hi = 8.0 / (h * h) * sn * sn;
  return top;
}

TestOperator fem_p1_1d(int n) {
  if (n < 1) throw std::invalid_argument("fem_p1_1d: need n >= 1");
  const double h = 1.0 / (n + 1);
  Triplets ta, tm;
  for (int i = 0; i < n; ++i) {
    ta.emplace_back(i, i, 2.0 / h);
    tm.emplace_back(i, i, 4.0 * h / 6.0);
    if (i + 1 < n) {
      ta.emplace_back(i, i + 1, -1.0 / h);
      ta.emplace_back(i + 1, i, -1.0 / h);
      tm.emplace_back(i, i + 1, h / 6.0);
      tm.emplace_back(i + 1, i, h / 6.0);
    }
  }
  TestOperator top;
  top.op = {from_triplets(n, ta), from_triplets(n, tm), false};
  top.name = "fem1d:" + std::to_string(n);
  top.has_analytic = true;
  // Pencil eigenvalues (6/h^2) (1 - cos(k pi h)) / (2 + cos(k pi h)).
  auto pencil = [h](int k) {
    const double c = std::cos(k * kPi * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
  };
  top.analytic_lo = pencil(1);
  top.analytic_hi = pencil(n);
  return top;
}

TestOperator fem_p1_2d(int n) {
  if (n < 2) throw std::invalid_argument("fem_p1_2d: need n >= 2");
  const double h = 1.0 / (n + 1);
  const Eigen::Index N = Eigen::Index(n) * n;
  Triplets ta, tm;
  ta.reserve(static_cast<size_t>(7 * N));
  tm.reserve(static_cast<size_t>(7 * N));
  auto idx = [n](int i, int j) { return Eigen::Index(j) * n + i; };
  auto inside = [n](int i, int j) { return i >= 0 && i < n && j >= 0 && j < n; };
  // Friedrichs-Keller: every cell split along the (+1,+1) diagonal.  The
  // assembled stiffness reduces to the 5-point stencil {4, -1}; the mass has
  // h^2/2 on the diagonal and h^2/12 towards the six edge neighbors,
  // including the (+1,+1)/(-1,-1) hypotenuse pair.
  const int di[6] = {1, -1, 0, 0, 1, -1};
  const int dj[6] = {0, 0, 1, -1, 1, -1};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index row = idx(i, j);
      ta.emplace_back(row, row, 4.0);
      tm.emplace_back(row, row, h * h / 2.0);
      for (int e = 0; e < 6; ++e) {
        const int ii = i + di[e], jj = j + dj[e];
        if (!inside(ii, jj)) continue;
        if (e < 4) ta.emplace_back(row, idx(ii, jj), -1.0);
        tm.emplace_back(row, idx(ii, jj), h * h / 12.0);
      }
    }
  }
  TestOperator top;
  top.op = {from_triplets(N, ta), from_triplets(N, tm), false};
  top.name = "fem2d:" + std::to_string(n);
  top.has_analytic = false;
  return top;
}

SpectralInterval spectral_bounds(const TestOperator& top, double safety) {
  if (!(safety >= 1.0))
    throw std::invalid_argument("spectral_bounds: safety must be >= 1");
  if (top.has_analytic)
    return {top.analytic_lo / safety, top.analytic_hi * safety,
            Exactness::analytic};
  return spectral_bounds(top.op, safety);
}

SpectralInterval spectral_bounds(const linalg::OperatorPair& op,
                                 double safety) {
  if (!(safety >= 1.0))
    throw std::invalid_argument("spectral_bounds: safety must be >= 1");
  linalg::LanczosEstimate est;
  try {
    est = linalg::lanczos_spectral_estimate(op);
  } catch (const std::exception&) {
    // Fallback: Gershgorin upper bound for the pencil plus a handful of
    // inverse iterations for the lower end.
    const Eigen::Index n = op.dim();
    linalg::Vector arow = op.A.cwiseAbs() * linalg::Vector::Ones(n);
    double hi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mrow =
          2.0 * op.M.coeff(i, i) -
          (op.M.row(i).cwiseAbs() * linalg::Vector::Ones(n))(0);
      if (mrow <= 0.0)
        throw std::runtime_error(
            "spectral_bounds: mass not diagonally dominant, no fallback");
      hi = std::max(hi, arow[i] / mrow);
    }
    linalg::ShiftedSolver inv(op, 0.0);
    linalg::Vector v = linalg::Vector::Ones(n);
    v /= linalg::m_norm(op.M, v);
    double theta = 0.0;
    for (int it = 0; it < 8; ++it) {
      linalg::Vector w = inv.solve(op.M * v);
      theta = linalg::m_dot(op.M, v, w);
      v = w / linalg::m_norm(op.M, w);
    }
    est = {theta > 0.0 ? 1.0 / theta : hi, hi};
  }
  return {est.lambda_min / safety, est.lambda_max * safety,
          Exactness::estimated};
}

}  // namespace fracrk::discretize
