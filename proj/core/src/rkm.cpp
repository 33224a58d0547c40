#include "fracrk/rkm.hpp"

#include <cmath>
#include <stdexcept>

#include "fracrk/specfun.hpp"

namespace fracrk::rkm {

namespace {

// Dense oracles beyond this size would dominate every run; the model
// problems stay well below it.
constexpr Eigen::Index kOracleLimit = 4096;

void check_vector(const linalg::OperatorPair& op, const linalg::Vector& b) {
  if (b.size() != op.dim())
    throw std::invalid_argument("rkm: vector size does not match operator");
}

double checked_norm(const linalg::OperatorPair& op, const linalg::Vector& b) {
  check_vector(op, b);
  const double nb = linalg::m_norm(op.M, b);
  if (!(nb > 0.0)) throw std::invalid_argument("rkm: b must be nonzero");
  return nb;
}

linalg::Vector mass_apply(const linalg::OperatorPair& op, const linalg::Vector& x) {
  return op.identity_mass ? x : linalg::Vector(op.M * x);
}

// Shared spectral-transform core: u = B diag(f(vals)) B^T M b for a basis B
// with B^T M B = I.
linalg::Vector transform(const linalg::DenseMatrix& B, const linalg::Vector& vals,
                         const std::function<double(double)>& f,
                         const linalg::OperatorPair& op, const linalg::Vector& b) {
  linalg::Vector w = B.transpose() * mass_apply(op, b);
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] *= f(vals[i]);
  return B * w;
}

std::function<double(double)> guarded(const functions::ParametricFunction& f) {
  return [&f](double lambda) {
    if (!(lambda > 0.0))
      throw std::domain_error("rkm: nonpositive eigenvalue in spectral transform");
    return functions::evaluate(f, lambda);
  };
}

struct FodeTerm {
  const linalg::Vector* vec;
  double beta;
  double weight;
};

std::vector<FodeTerm> fode_terms(const linalg::OperatorPair& op,
                                 const linalg::Vector& u0, const Forcing& forcing,
                                 double alpha, double s, double t) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::domain_error("solve_fode: alpha must lie in (0, 1]");
  if (!(s >= 0.0) || s > 1.0)
    throw std::domain_error("solve_fode: s must lie in [0, 1]");
  if (!(t >= 0.0)) throw std::domain_error("solve_fode: t must be nonnegative");
  check_vector(op, u0);
  for (const auto& [deg, vec] : forcing) {
    if (deg < 0 || deg > 6)
      throw std::domain_error("solve_fode: forcing degree must lie in [0, 6]");
    check_vector(op, vec);
  }

  std::vector<FodeTerm> terms;
  if (u0.norm() > 0.0) terms.push_back({&u0, 1.0, 1.0});
  for (const auto& [deg, vec] : forcing) {
    if (vec.norm() == 0.0) continue;
    const double weight =
        specfun::gamma_fn(deg + 1.0) * std::pow(t, alpha + deg);
    terms.push_back({&vec, alpha + deg + 1.0, weight});
  }
  return terms;
}

}  // namespace

KrylovBasis build_basis(const linalg::OperatorPair& op, const linalg::Vector& b,
                        const poles::PoleSet& poles) {
  checked_norm(op, b);
  poles::validate(poles);

  const linalg::Vector Mb = mass_apply(op, b);
  std::vector<linalg::Vector> raw;
  raw.reserve(poles.poles.size() + 1);
  raw.push_back(b);
  for (double xi : poles.poles) raw.push_back(linalg::solve_shifted(op, xi, Mb));

  const auto mgs = linalg::mgs_m_orthonormalize(raw, op.M);
  KrylovBasis basis;
  basis.V = mgs.V;
  basis.reduced = basis.V.transpose() * (op.A * basis.V);
  basis.reduced = 0.5 * (basis.reduced + basis.reduced.transpose()).eval();
  basis.poles = poles;
  basis.op = &op;
  basis.deflated = static_cast<int>(raw.size()) - mgs.retained;
  return basis;
}

std::vector<double> ritz_values(const KrylovBasis& basis) {
  const linalg::Vector vals = linalg::dense_sym_eig(basis.reduced).values;
  return {vals.data(), vals.data() + vals.size()};
}

linalg::Vector apply_f(const KrylovBasis& basis,
                       const std::function<double(double)>& f,
                       const linalg::Vector& b) {
  if (basis.op == nullptr) throw std::invalid_argument("rkm: basis not built");
  check_vector(*basis.op, b);
  const auto eig = linalg::dense_sym_eig(basis.reduced);
  const linalg::DenseMatrix B = basis.V * eig.vectors;  // M-orthonormal too
  return transform(B, eig.values, f, *basis.op, b);
}

linalg::Vector apply_f(const KrylovBasis& basis,
                       const functions::ParametricFunction& f,
                       const linalg::Vector& b) {
  return apply_f(basis, guarded(f), b);
}

linalg::Vector exact_apply(const linalg::OperatorPair& op,
                           const std::function<double(double)>& f,
                           const linalg::Vector& b) {
  check_vector(op, b);
  if (op.dim() > kOracleLimit)
    throw std::invalid_argument("rkm: operator too large for the dense oracle");
  const auto eig = linalg::sym_generalized_eig(op);
  return transform(eig.vectors, eig.values, f, op, b);
}

linalg::Vector exact_apply(const linalg::OperatorPair& op,
                           const functions::ParametricFunction& f,
                           const linalg::Vector& b) {
  return exact_apply(op, guarded(f), b);
}

double rkm_error(const linalg::OperatorPair& op,
                 const functions::ParametricFunction& f,
                 const poles::PoleSet& poles, const linalg::Vector& b, int k) {
  if (k != static_cast<int>(poles.poles.size()))
    throw std::invalid_argument("rkm_error: k must match the pole count");
  const double nb = checked_norm(op, b);
  const linalg::Vector bn = b / nb;
  const KrylovBasis basis = build_basis(op, bn, poles);
  const linalg::Vector u = apply_f(basis, f, bn);
  const linalg::Vector ex = exact_apply(op, f, bn);
  return linalg::m_norm(op.M, ex - u);
}

linalg::Vector solve_fode(const linalg::OperatorPair& op, const linalg::Vector& u0,
                          const Forcing& forcing, double alpha, double s, double t) {
  const auto terms = fode_terms(op, u0, forcing, alpha, s, t);
  if (t == 0.0) return u0;
  if (op.dim() > kOracleLimit)
    throw std::invalid_argument("rkm: operator too large for the dense oracle");

  // One decomposition serves every term.
  const auto eig = linalg::sym_generalized_eig(op);
  linalg::Vector u = linalg::Vector::Zero(op.dim());
  for (const auto& term : terms) {
    const functions::ParametricFunction f =
        functions::MittagLeffler{alpha, term.beta, t, s};
    u += term.weight * transform(eig.vectors, eig.values, guarded(f), op, *term.vec);
  }
  return u;
}

linalg::Vector solve_fode(const linalg::OperatorPair& op, const linalg::Vector& u0,
                          const Forcing& forcing, double alpha, double s, double t,
                          const poles::PoleSet& poles) {
  const auto terms = fode_terms(op, u0, forcing, alpha, s, t);
  if (t == 0.0) return u0;

  linalg::Vector u = linalg::Vector::Zero(op.dim());
  for (const auto& term : terms) {
    const functions::ParametricFunction f =
        functions::MittagLeffler{alpha, term.beta, t, s};
    const KrylovBasis basis = build_basis(op, *term.vec, poles);
    u += term.weight * apply_f(basis, f, *term.vec);
  }
  return u;
}

}  // namespace fracrk::rkm
