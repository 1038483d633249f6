#pragma once

// Dense revised simplex for small-row linear programs with bounded variables:
//
//   minimize c^T x  subject to  A x = b,  lower <= x <= upper.
//
// Lower bounds must be finite; upper bounds may be +inf. Built for the
// quantile-regression duals, which have one row per free primal coefficient
// and one bounded column per observation, so the basis stays tiny while the
// column count grows with n.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qineq::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Problem {
  Eigen::SparseMatrix<double> A;  // column-major
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct Options {
  double optimality_tol = 1e-10;
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-10;
  int refactor_every = 64;
  long max_iterations = 500000;
};

struct Solution {
  Status status = Status::IterationLimit;
  Eigen::VectorXd x;
  /// Simplex multipliers y with B^T y = c_B at the final basis.
  Eigen::VectorXd duals;
  double objective = 0.0;
  long iterations = 0;
};

Solution solve(const Problem& problem, const Options& options = {});

}  // namespace qineq::lp
