#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "fracrk/discretize.hpp"

using namespace fracrk;
using discretize::Exactness;
using discretize::SpectralInterval;
using discretize::TestOperator;
using linalg::DenseMatrix;
using linalg::Vector;

namespace {

constexpr double kPi = 3.14159265358979323846;

double relerr(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("fd_laplacian_2d structure and spectrum") {
  TestOperator fd = discretize::fd_laplacian_2d(2);
  CHECK(fd.op.dim() == 4);
  CHECK(fd.op.identity_mass);
  const double h = 1.0 / 3.0;
  CHECK(relerr(fd.analytic_lo,
               8.0 / (h * h) * std::pow(std::sin(kPi * h / 2.0), 2)) < 1e-15);

  // The assembled matrix must reproduce the analytic extremal eigenvalues.
  TestOperator fd5 = discretize::fd_laplacian_2d(5);
  auto eig = linalg::sym_generalized_eig(fd5.op);
  CHECK(relerr(eig.values[0], fd5.analytic_lo) < 1e-10);
  CHECK(relerr(eig.values[fd5.op.dim() - 1], fd5.analytic_hi) < 1e-10);

  // M-matrix structure: the action on the ones vector is nonnegative.
  Vector ones = Vector::Ones(fd5.op.dim());
  Vector r = fd5.op.A * ones;
  CHECK(r.minCoeff() >= -1e-12);

  // Stored analytic ratio matches the defining formula exactly.
  TestOperator fd31 = discretize::fd_laplacian_2d(31);
  const double h31 = 1.0 / 32.0;
  const double lo = 8.0 / (h31 * h31) * std::pow(std::sin(kPi * h31 / 2.0), 2);
  const double hi =
      8.0 / (h31 * h31) * std::pow(std::sin(31.0 * kPi * h31 / 2.0), 2);
  CHECK(relerr(fd31.analytic_hi / fd31.analytic_lo, hi / lo) < 1e-12);

  CHECK_THROWS_AS(discretize::fd_laplacian_2d(1), std::invalid_argument);
}

TEST_CASE("fem_p1_1d matrices and pencil") {
  TestOperator one = discretize::fem_p1_1d(1);
  CHECK(relerr(one.op.A.coeff(0, 0), 4.0) < 1e-15);
  CHECK(relerr(one.op.M.coeff(0, 0), 1.0 / 3.0) < 1e-15);

  const int n = 3;
  const double h = 1.0 / (n + 1);
  TestOperator fem = discretize::fem_p1_1d(n);
  auto eig = linalg::sym_generalized_eig(fem.op);
  for (int k = 1; k <= n; ++k) {
    const double c = std::cos(k * kPi * h);
    const double want = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
    CHECK(relerr(eig.values[k - 1], want) < 1e-12);
  }
  CHECK(relerr(fem.analytic_lo, eig.values[0]) < 1e-12);
  CHECK(relerr(fem.analytic_hi, eig.values[n - 1]) < 1e-12);

  // Interior mass: 1^T M 1 = 1 - 4h/3 (the two boundary cells lose mass).
  Vector ones = Vector::Ones(n);
  const double mass = ones.dot(fem.op.M * ones);
  CHECK(std::abs(mass - (1.0 - 4.0 * h / 3.0)) < 1e-14);
  CHECK(std::abs(mass - (1.0 - h)) < h);
}

TEST_CASE("fem_p1_2d patch test and spectrum") {
  const int n = 6;
  const double h = 1.0 / (n + 1);
  TestOperator fem = discretize::fem_p1_2d(n);
  CHECK(fem.op.dim() == n * n);

  // Stiffness annihilates linear functions on rows whose stencil support is
  // fully interior.
  Vector u(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      u[j * n + i] = 0.7 * (i + 1) * h - 1.3 * (j + 1) * h + 0.25;
  Vector Au = fem.op.A * u;
  for (int j = 1; j < n - 1; ++j)
    for (int i = 1; i < n - 1; ++i)
      CHECK(std::abs(Au[j * n + i]) < 1e-12);

  // Smallest pencil eigenvalue approaches the continuous 2 pi^2 at rate h^2
  // (consistent P1 mass overestimates: error ~ 2.5 h^2 relative).
  TestOperator fem4 = discretize::fem_p1_2d(4);
  auto eig = linalg::sym_generalized_eig(fem4.op);
  const double err4 = relerr(eig.values[0], 2.0 * kPi * kPi);
  CHECK(err4 < 0.11);
  auto eig7 = linalg::sym_generalized_eig(discretize::fem_p1_2d(7).op);
  CHECK(relerr(eig7.values[0], 2.0 * kPi * kPi) < 0.05);
  auto eig9 = linalg::sym_generalized_eig(discretize::fem_p1_2d(9).op);
  const double err9 = relerr(eig9.values[0], 2.0 * kPi * kPi);
  // h halves from n=4 to n=9; the eigenvalue error must drop ~4x.
  CHECK(err9 < 0.35 * err4);

  // Total interior mass is bounded by the domain area.
  Vector ones = Vector::Ones(n * n);
  CHECK(ones.dot(fem.op.M * ones) <= 1.0);

  // SPD spot check via the generalized eigendecomposition.
  CHECK(eig.values[0] > 0.0);
}

TEST_CASE("spectral_bounds") {
  // Diagonal operator: exact bounds with safety 1.
  linalg::DenseMatrix D = linalg::DenseMatrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 10.0;
  linalg::SparseMatrix Ds(2, 2);
  Ds.insert(0, 0) = 1.0;
  Ds.insert(1, 1) = 10.0;
  linalg::OperatorPair dop{Ds, linalg::sparse_identity(2), true};
  SpectralInterval di = discretize::spectral_bounds(dop, 1.0);
  CHECK(relerr(di.lo, 1.0) < 1e-9);
  CHECK(relerr(di.hi, 10.0) < 1e-9);
  CHECK(di.exactness == Exactness::estimated);

  // Safety factor widens the interval by exactly that factor each side.
  SpectralInterval ds = discretize::spectral_bounds(dop, 1.05);
  CHECK(relerr(ds.lo, di.lo / 1.05) < 1e-14);
  CHECK(relerr(ds.hi, di.hi * 1.05) < 1e-14);

  // Lanczos estimates within 1% of the analytic values before safety.
  TestOperator fd = discretize::fd_laplacian_2d(15);
  SpectralInterval est = discretize::spectral_bounds(fd.op, 1.0);
  CHECK(relerr(est.lo, fd.analytic_lo) < 0.01);
  CHECK(relerr(est.hi, fd.analytic_hi) < 0.01);

  // The TestOperator overload prefers analytic values and flags them.
  SpectralInterval ana = discretize::spectral_bounds(fd, 1.0);
  CHECK(ana.exactness == Exactness::analytic);
  CHECK(ana.lo == fd.analytic_lo);
  CHECK(ana.hi == fd.analytic_hi);

  SpectralInterval fem = discretize::spectral_bounds(discretize::fem_p1_2d(5));
  CHECK(fem.exactness == Exactness::estimated);
  CHECK(fem.lo > 0.0);
  CHECK(fem.hi > fem.lo);

  CHECK_THROWS_AS(discretize::spectral_bounds(dop, 0.5), std::invalid_argument);
}
