#pragma once

#include <string>

#include "fracrk/linalg.hpp"

namespace fracrk::discretize {

enum class Exactness { analytic, estimated };

// Spectral inclusion interval 0 < lo <= lambda_min <= lambda_max <= hi.
struct SpectralInterval {
  double lo = 0.0;
  double hi = 0.0;
  Exactness exactness = Exactness::estimated;
};

// A generated test operator; analytic extremal eigenvalues are carried along
// when the generator has a closed form for them.
struct TestOperator {
  linalg::OperatorPair op;
  std::string name;
  bool has_analytic = false;
  double analytic_lo = 0.0;
  double analytic_hi = 0.0;
};

// 5-point Laplacian on the unit square, Dirichlet, n interior nodes per side,
// h = 1/(n+1), M = I.  Eigenvalues (4/h^2)(sin^2(i pi h/2) + sin^2(j pi h/2)).
TestOperator fd_laplacian_2d(int n);

// 1D P1 elements on (0,1), n interior nodes: A = (1/h) tridiag(-1,2,-1),
// M = (h/6) tridiag(1,4,1).
TestOperator fem_p1_1d(int n);

// 2D P1 elements on the uniform right-triangle (Friedrichs-Keller) mesh,
// n interior nodes per side, Dirichlet dofs eliminated.
TestOperator fem_p1_2d(int n);

// Interval [est_min/safety, est_max*safety].  The TestOperator overload uses
// the generator's analytic values when present (flagged analytic); otherwise
// Lanczos estimates (flagged estimated).
SpectralInterval spectral_bounds(const TestOperator& top, double safety = 1.0);
SpectralInterval spectral_bounds(const linalg::OperatorPair& op,
                                 double safety = 1.0);

}  // namespace fracrk::discretize
