#include "fracrk/linalg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fracrk::linalg {

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

double m_dot(const SparseMatrix& M, const Vector& x, const Vector& y) {
  return x.dot(M * y);
}

double m_norm(const SparseMatrix& M, const Vector& x) {
  return std::sqrt(std::max(0.0, m_dot(M, x, x)));
}

ShiftedSolver::ShiftedSolver(const OperatorPair& op, double shift)
    : shift_(shift) {
  SparseMatrix S = op.A;
  if (shift != 0.0) S -= shift * op.M;
  llt_.compute(S);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error(
        "linalg: Cholesky factorization of (A - shift*M) failed; the shifted "
        "operator is not positive definite (shift inside the spectrum?)");
}

Vector ShiftedSolver::solve(const Vector& rhs) const {
  Vector x = llt_.solve(rhs);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("linalg: shifted solve failed");
  return x;
}

Vector solve_shifted(const OperatorPair& op, double shift, const Vector& rhs) {
  return ShiftedSolver(op, shift).solve(rhs);
}

GeneralizedEig sym_generalized_eig(const OperatorPair& op) {
  const Eigen::Index n = op.dim();
  if (n > 4000)
    throw std::invalid_argument(
        "linalg: sym_generalized_eig guards N <= 4000 (dense work)");
  DenseMatrix A = DenseMatrix(op.A);
  DenseMatrix M = DenseMatrix(op.M);
  A = 0.5 * (A + A.transpose()).eval();
  M = 0.5 * (M + M.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(A, M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("linalg: generalized eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SymEig dense_sym_eig(const DenseMatrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("linalg: dense_sym_eig needs a square matrix");
  DenseMatrix S = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("linalg: symmetric eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

MgsResult mgs_m_orthonormalize(const std::vector<Vector>& vectors,
                               const SparseMatrix& M, double deflation_tol) {
  if (vectors.empty())
    throw std::invalid_argument("linalg: mgs_m_orthonormalize on empty input");
  const Eigen::Index n = vectors.front().size();
  DenseMatrix V(n, static_cast<Eigen::Index>(vectors.size()));
  Eigen::Index cols = 0;
  for (const Vector& w0 : vectors) {
    if (w0.size() != n)
      throw std::invalid_argument("linalg: inconsistent vector dimensions");
    const double norm0 = m_norm(M, w0);
    if (norm0 == 0.0) continue;
    Vector w = w0;
    // Two MGS sweeps: "twice is enough" for the orthogonality target here.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        const double c = m_dot(M, V.col(j), w);
        w -= c * V.col(j);
      }
    }
    const double nrm = m_norm(M, w);
    if (nrm < deflation_tol * norm0) continue;  // numerically dependent
    V.col(cols) = w / nrm;
    ++cols;
  }
  if (cols == 0)
    throw std::invalid_argument(
        "linalg: mgs_m_orthonormalize found an empty span (all inputs zero "
        "or deflated)");
  return {V.leftCols(cols), static_cast<int>(cols)};
}

namespace {

// M-inner-product Lanczos with full reorthogonalization for the largest
// eigenvalue of the operator v -> apply(v), assumed M-self-adjoint.
template <typename Apply>
double lanczos_largest(const SparseMatrix& M, Eigen::Index n,
                       const Apply& apply, int max_iters) {
  std::mt19937 rng(0x5eedu);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
  v /= m_norm(M, v);

  const int m = std::min<int>(max_iters, static_cast<int>(n));
  DenseMatrix V(n, m);
  Vector alpha(m), beta(m);
  int steps = 0;
  for (int j = 0; j < m; ++j) {
    V.col(j) = v;
    Vector w = apply(v);
    alpha[j] = m_dot(M, v, w);
    // Full reorthogonalization against all previous Lanczos vectors.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const double c = m_dot(M, V.col(i), w);
        w -= c * V.col(i);
      }
    }
    const double b = m_norm(M, w);
    steps = j + 1;
    if (b < 1e-12 || j == m - 1) break;  // invariant subspace found
    beta[j] = b;
    v = w / b;
  }

  DenseMatrix T = DenseMatrix::Zero(steps, steps);
  for (int j = 0; j < steps; ++j) {
    T(j, j) = alpha[j];
    if (j + 1 < steps) {
      T(j, j + 1) = beta[j];
      T(j + 1, j) = beta[j];
    }
  }
  const SymEig eig = dense_sym_eig(T);
  return eig.values[steps - 1];
}

}  // namespace

LanczosEstimate lanczos_spectral_estimate(const OperatorPair& op,
                                          int max_iters) {
  const Eigen::Index n = op.dim();
  if (n == 0) throw std::invalid_argument("linalg: empty operator");

  Eigen::SimplicialLLT<SparseMatrix> mass;
  if (!op.identity_mass) {
    mass.compute(op.M);
    if (mass.info() != Eigen::Success)
      throw std::runtime_error("linalg: mass matrix not positive definite");
  }
  Eigen::SimplicialLLT<SparseMatrix> stiff(op.A);
  if (stiff.info() != Eigen::Success)
    throw std::runtime_error("linalg: stiffness matrix not positive definite");

  // Upper end: largest eigenvalue of M^{-1}A.
  const double hi = lanczos_largest(
      op.M, n,
      [&](const Vector& x) -> Vector {
        Vector y = op.A * x;
        return op.identity_mass ? y : Vector(mass.solve(y));
      },
      max_iters);
  // Lower end: largest eigenvalue of the inverse operator A^{-1}M.
  const double inv_lo = lanczos_largest(
      op.M, n,
      [&](const Vector& x) -> Vector { return stiff.solve(op.M * x); },
      max_iters);
  if (!(inv_lo > 0.0) || !(hi > 0.0))
    throw std::runtime_error("linalg: spectral estimate failed (not SPD?)");
  return {1.0 / inv_lo, hi};
}

}  // namespace fracrk::linalg
