#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include "fracrk/linalg.hpp"
#include "fracrk/matrix_market.hpp"

using namespace fracrk;
using linalg::DenseMatrix;
using linalg::OperatorPair;
using linalg::SparseMatrix;
using linalg::Vector;

namespace {

constexpr double kPi = 3.14159265358979323846;

SparseMatrix to_sparse(const DenseMatrix& D) {
  SparseMatrix S(D.rows(), D.cols());
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      if (D(i, j) != 0.0) t.emplace_back(i, j, D(i, j));
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

// 1D P1 finite element pair on (0,1), n interior nodes, assembled here so the
// tests stay independent of any library generator.
OperatorPair fem1d_pair(int n) {
  const double h = 1.0 / (n + 1);
  DenseMatrix A = DenseMatrix::Zero(n, n), M = DenseMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = 2.0 / h;
    M(i, i) = 4.0 * h / 6.0;
    if (i + 1 < n) {
      A(i, i + 1) = A(i + 1, i) = -1.0 / h;
      M(i, i + 1) = M(i + 1, i) = h / 6.0;
    }
  }
  return {to_sparse(A), to_sparse(M), false};
}

DenseMatrix random_spd(int n, unsigned seed, double diag_boost) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = gauss(rng);
  return B.transpose() * B + diag_boost * DenseMatrix::Identity(n, n);
}

double relerr(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("solve_shifted basics") {
  const int n = 4;
  OperatorPair id{linalg::sparse_identity(n), linalg::sparse_identity(n), true};
  Vector e1 = Vector::Zero(n);
  e1[0] = 1.0;
  // (I - (-1) I) x = e1  =>  x = e1 / 2.
  Vector x = linalg::solve_shifted(id, -1.0, e1);
  CHECK((x - 0.5 * e1).norm() < 1e-15);

  OperatorPair fem = fem1d_pair(3);
  Vector rhs(3);
  rhs << 1.0, -2.0, 0.5;
  Vector got = linalg::solve_shifted(fem, 0.0, rhs);
  // Dense full-pivot LU as an independent factorization oracle.
  Vector want = DenseMatrix(fem.A).fullPivLu().solve(rhs);
  CHECK((got - want).norm() < 1e-12 * want.norm());

  // A shift above the whole spectrum makes A - shift*M negative definite.
  CHECK_THROWS_AS(linalg::solve_shifted(fem, 1e9, rhs), std::runtime_error);
}

TEST_CASE("solve_shifted multiply-back residual") {
  OperatorPair fem = fem1d_pair(24);
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double shift : {0.0, -1.0, -137.5, -1e6}) {
    Vector rhs(24);
    for (int i = 0; i < 24; ++i) rhs[i] = gauss(rng);
    Vector x = linalg::solve_shifted(fem, shift, rhs);
    Vector back = fem.A * x - shift * (fem.M * x);
    CHECK((back - rhs).norm() < 1e-12 * rhs.norm());
  }
}

TEST_CASE("sym_generalized_eig diagonal and FEM pencil") {
  DenseMatrix A = DenseMatrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  OperatorPair op{to_sparse(A), linalg::sparse_identity(2), true};
  auto eig = linalg::sym_generalized_eig(op);
  CHECK(relerr(eig.values[0], 1.0) < 1e-14);
  CHECK(relerr(eig.values[1], 2.0) < 1e-14);

  // Analytic generalized eigenvalues of the 1D P1 pencil:
  // lambda_k = (6/h^2) (1 - cos(k pi h)) / (2 + cos(k pi h)).
  const int n = 4;
  const double h = 1.0 / (n + 1);
  OperatorPair fem = fem1d_pair(n);
  auto feig = linalg::sym_generalized_eig(fem);
  for (int k = 1; k <= n; ++k) {
    const double c = std::cos(k * kPi * h);
    const double want = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
    CHECK(relerr(feig.values[k - 1], want) < 1e-12);
  }
}

TEST_CASE("sym_generalized_eig random pair properties") {
  const int n = 20;
  OperatorPair op{to_sparse(random_spd(n, 11, 1.0)),
                  to_sparse(random_spd(n, 22, double(n))), false};
  auto eig = linalg::sym_generalized_eig(op);
  for (int i = 1; i < n; ++i) CHECK(eig.values[i] >= eig.values[i - 1]);
  DenseMatrix MV = DenseMatrix(op.M) * eig.vectors;
  DenseMatrix G = eig.vectors.transpose() * MV;
  CHECK((G - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  DenseMatrix R = DenseMatrix(op.A) * eig.vectors - MV * eig.values.asDiagonal();
  CHECK(R.cwiseAbs().maxCoeff() < 1e-9 * DenseMatrix(op.A).norm());
}

TEST_CASE("dense_sym_eig") {
  auto id = linalg::dense_sym_eig(DenseMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(relerr(id.values[i], 1.0) < 1e-14);

  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  auto de = linalg::dense_sym_eig(d);
  CHECK(de.values[0] == 1.0);
  CHECK(de.values[1] == 3.0);

  DenseMatrix S = random_spd(10, 33, 0.5);
  auto se = linalg::dense_sym_eig(S);
  DenseMatrix rec =
      se.vectors * se.values.asDiagonal() * se.vectors.transpose();
  CHECK((rec - S).cwiseAbs().maxCoeff() < 1e-12 * S.norm());
}

TEST_CASE("mgs_m_orthonormalize") {
  const int n = 5;
  Vector e1 = Vector::Zero(n), e2 = Vector::Zero(n);
  e1[0] = 1.0;
  e2[1] = 1.0;
  SparseMatrix I = linalg::sparse_identity(n);

  auto dup = linalg::mgs_m_orthonormalize({e1, e1}, I);
  CHECK(dup.retained == 1);
  CHECK((dup.V.col(0) - e1).norm() < 1e-15);

  auto two = linalg::mgs_m_orthonormalize({e1, e2}, I);
  CHECK(two.retained == 2);

  // Random vectors against a random SPD mass.
  SparseMatrix M = to_sparse(random_spd(n, 44, double(n)));
  std::mt19937 rng(55);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> vs;
  for (int c = 0; c < 5; ++c) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    vs.push_back(v);
  }
  auto r = linalg::mgs_m_orthonormalize(vs, M);
  CHECK(r.retained == 5);
  DenseMatrix G = r.V.transpose() * DenseMatrix(M) * r.V;
  CHECK((G - DenseMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);

  // Near-dependent inputs (condition ~1e8): reorthogonalization must hold
  // the orthogonality loss at roundoff level, not sqrt(eps).
  std::vector<Vector> nd = {e1, e1 + 1e-8 * e2, e2};
  auto rd = linalg::mgs_m_orthonormalize(nd, I);
  CHECK(rd.retained >= 2);
  DenseMatrix Gd = rd.V.transpose() * rd.V;
  CHECK((Gd - DenseMatrix::Identity(rd.retained, rd.retained))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  CHECK_THROWS_AS(linalg::mgs_m_orthonormalize({Vector::Zero(n)}, I),
                  std::invalid_argument);
}

TEST_CASE("spd spot checks") {
  OperatorPair fem = fem1d_pair(9);
  std::mt19937 rng(66);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x(9);
    for (int i = 0; i < 9; ++i) x[i] = gauss(rng);
    if (x.norm() == 0.0) continue;
    CHECK(x.dot(fem.A * x) > 0.0);
    CHECK(x.dot(fem.M * x) > 0.0);
  }
}

TEST_CASE("lanczos spectral estimate") {
  DenseMatrix D = DenseMatrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 10.0;
  OperatorPair dop{to_sparse(D), linalg::sparse_identity(2), true};
  auto est = linalg::lanczos_spectral_estimate(dop);
  CHECK(relerr(est.lambda_min, 1.0) < 1e-10);
  CHECK(relerr(est.lambda_max, 10.0) < 1e-10);

  // 1D finite differences: analytic eigenvalues (4/h^2) sin^2(k pi h / 2).
  const int n = 40;
  const double h = 1.0 / (n + 1);
  DenseMatrix T = DenseMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    T(i, i) = 2.0 / (h * h);
    if (i + 1 < n) T(i, i + 1) = T(i + 1, i) = -1.0 / (h * h);
  }
  OperatorPair fd{to_sparse(T), linalg::sparse_identity(n), true};
  auto fde = linalg::lanczos_spectral_estimate(fd);
  const double lo = 4.0 / (h * h) * std::pow(std::sin(kPi * h / 2.0), 2);
  const double hi = 4.0 / (h * h) * std::pow(std::sin(n * kPi * h / 2.0), 2);
  CHECK(relerr(fde.lambda_min, lo) < 1e-8);
  CHECK(relerr(fde.lambda_max, hi) < 1e-6);

  // Generalized pencil: estimates must match the dense oracle.
  OperatorPair fem = fem1d_pair(16);
  auto ge = linalg::lanczos_spectral_estimate(fem);
  auto oracle = linalg::sym_generalized_eig(fem);
  CHECK(relerr(ge.lambda_min, oracle.values[0]) < 1e-8);
  CHECK(relerr(ge.lambda_max, oracle.values[15]) < 1e-6);
}

TEST_CASE("matrix market round trips") {
  OperatorPair fem = fem1d_pair(6);
  const std::string stem = "mm_roundtrip_test";
  io::write_operator_pair(stem, fem);
  OperatorPair back = io::read_operator_pair(stem);
  CHECK((DenseMatrix(back.A) - DenseMatrix(fem.A)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((DenseMatrix(back.M) - DenseMatrix(fem.M)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(back.identity_mass);

  OperatorPair id{linalg::sparse_identity(3), linalg::sparse_identity(3), true};
  io::write_operator_pair(stem, id);
  CHECK(io::read_operator_pair(stem).identity_mass);

  Vector v(4);
  v << 1.0, -0.25, 3.5e-13, 2.0 / 3.0;
  io::write_vector(stem + ".vec.mtx", v);
  Vector vb = io::read_vector(stem + ".vec.mtx");
  CHECK((vb - v).norm() == 0.0);
  io::write_vector(stem + ".vec.txt", v);
  Vector vt = io::read_vector(stem + ".vec.txt");
  CHECK((vt - v).norm() == 0.0);

  CHECK_THROWS_AS(io::read_matrix_market("definitely_missing.mtx"),
                  std::runtime_error);
  std::remove((stem + ".A.mtx").c_str());
  std::remove((stem + ".M.mtx").c_str());
  std::remove((stem + ".vec.mtx").c_str());
  std::remove((stem + ".vec.txt").c_str());
}
