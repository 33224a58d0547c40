#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace fracrk::linalg {

using SparseMatrix = Eigen::SparseMatrix<double>;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Stiffness/mass pair defining L = M^{-1}A and the M-inner product.  Both
// matrices are symmetric positive definite; M may be the identity (finite
// differences), flagged so solvers can skip mass solves.
struct OperatorPair {
  SparseMatrix A;
  SparseMatrix M;
  bool identity_mass = false;

  Eigen::Index dim() const { return A.rows(); }
};

SparseMatrix sparse_identity(Eigen::Index n);

double m_dot(const SparseMatrix& M, const Vector& x, const Vector& y);
double m_norm(const SparseMatrix& M, const Vector& x);

// Sparse Cholesky of (A - shift*M), reusable across right-hand sides.
// Shifts are nonpositive in every intended use (poles are negative reals),
// keeping the matrix positive definite.
class ShiftedSolver {
 public:
  ShiftedSolver(const OperatorPair& op, double shift);
  Vector solve(const Vector& rhs) const;
  double shift() const { return shift_; }

 private:
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  double shift_;
};

// One-shot convenience wrapper around ShiftedSolver.
Vector solve_shifted(const OperatorPair& op, double shift, const Vector& rhs);

struct GeneralizedEig {
  Vector values;        // ascending
  DenseMatrix vectors;  // M-orthonormal columns, A*v = lambda*M*v
};

// Dense generalized symmetric-definite eigendecomposition; desk-scale oracle.
GeneralizedEig sym_generalized_eig(const OperatorPair& op);

struct SymEig {
  Vector values;        // ascending
  DenseMatrix vectors;  // orthonormal columns
};

SymEig dense_sym_eig(const DenseMatrix& m);

struct MgsResult {
  DenseMatrix V;  // M-orthonormal columns
  int retained = 0;
};

// Modified Gram-Schmidt in the M-inner product with one unconditional
// reorthogonalization pass.  Vectors whose M-norm after projection drops
// below deflation_tol times their original M-norm are dropped.
MgsResult mgs_m_orthonormalize(const std::vector<Vector>& vectors,
                               const SparseMatrix& M,
                               double deflation_tol = 1e-10);

struct LanczosEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Extremal generalized eigenvalue estimates of (A, M): M-inner-product
// Lanczos with full reorthogonalization on M^{-1}A for the upper end and on
// A^{-1}M for the lower end.  Deterministic start vector.
LanczosEstimate lanczos_spectral_estimate(const OperatorPair& op,
                                          int max_iters = 60);

}  // namespace fracrk::linalg
