#pragma once

// Check-loss quantile regression solved exactly as a linear program.

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qineq/pwl_surface.hpp"

namespace qineq {

/// Design matrix with a leading column of ones plus log responses.
class Dataset {
 public:
  /// `X` must already contain the intercept column.
  Dataset(Eigen::MatrixXd X, Eigen::VectorXd z);

  /// Builds the design from raw covariates (n x d) and positive responses,
  /// taking z = log y.
  static Dataset from_responses(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& y);

  const Eigen::MatrixXd& X() const noexcept { return X_; }
  const Eigen::VectorXd& z() const noexcept { return z_; }
  int n() const noexcept { return static_cast<int>(X_.rows()); }
  int d() const noexcept { return static_cast<int>(X_.cols()) - 1; }

  /// Copy with z shifted by a constant.
  Dataset shifted(double c) const;

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd z_;
};

enum class FitStatus { Optimal, MaxIterations, Degenerate };

std::string_view to_string(FitStatus status) noexcept;

struct FitResult {
  Eigen::VectorXd beta;
  double objective = 0.0;
  FitStatus status = FitStatus::Optimal;
};

/// A fitted surface plus the solver status of each knot row.
struct SurfaceFit {
  BetaSurface surface;
  std::vector<FitStatus> status;

  bool all_optimal() const noexcept;
};

/// rho_p(u) = u (p - 1{u < 0}).
double check_loss(double u, double p) noexcept;

/// Sum of check losses of the residuals z - X beta.
double check_objective(const Dataset& data, double p, const Eigen::VectorXd& beta);

/// Ordinary quantile regression at order p.
FitResult oqr_fit(const Dataset& data, double p);

/// Independent OQR fits at every knot of the grid.
SurfaceFit oqr_fit_grid(const Dataset& data, const ProbGrid& grid);

/// Linear inequality constraints G theta >= h on stacked coefficient vectors.
struct LinearConstraints {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;

  bool empty() const noexcept { return G.rows() == 0; }
};

struct JointFit {
  /// Coefficients per order, one row per entry of `orders`.
  Eigen::MatrixXd beta;
  double objective = 0.0;
  FitStatus status = FitStatus::Optimal;
};

/// Minimizes sum_k w_k sum_i rho_{p_k}(z_i - x_i^T beta_k) subject to
/// G vec(beta) >= h, where vec stacks beta_1, beta_2, ... The LP is solved in
/// its dual form (one row per coefficient) and beta read off the simplex
/// multipliers.
JointFit constrained_qr_fit(const Dataset& data, std::span<const double> orders,
                            std::span<const double> weights, const LinearConstraints& constraints);

/// Single-order fit with constraints G beta >= h.
FitResult constrained_qr_fit(const Dataset& data, double p, const LinearConstraints& constraints);

}  // namespace qineq
