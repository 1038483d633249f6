#pragma once

// Literature baselines for non-crossing quantile regression:
//   CQR - stepwise fits from the median outward with coordinatewise
//         monotone coefficients;
//   WL1 - stepwise fits separated by delta0 at the corners of the
//         (rescaled) covariate box;
//   BRW - one joint LP over all orders with non-crossing enforced at the
//         corners of the covariate box.

#include <vector>

#include <Eigen/Dense>

#include "qineq/qr_core.hpp"

namespace qineq {

struct BaselineConfig {
  /// Minimum separation between consecutive WL1 fits at each corner.
  double delta0 = 1e-6;
  /// Covariate vectors at which non-crossing is enforced. Empty means the
  /// corners of the data's bounding box. WL1 rescales to the bounding box of
  /// this set.
  std::vector<Eigen::VectorXd> corner_set;
};

/// All 2^d corners of the box [lo, hi].
std::vector<Eigen::VectorXd> box_corners(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

/// Corners of the bounding box of the data's covariates.
std::vector<Eigen::VectorXd> data_corners(const Dataset& data);

/// Zero-based row at which the stepwise methods start: the knot at 0.5 for
/// even m, knot ceil((m-1)/2) otherwise.
int median_start_row(const ProbGrid& grid);

SurfaceFit cqr_fit_grid(const Dataset& data, const ProbGrid& grid);

SurfaceFit wl1_fit_grid(const Dataset& data, const ProbGrid& grid, const BaselineConfig& cfg = {});

SurfaceFit brw_fit_grid(const Dataset& data, const ProbGrid& grid, const BaselineConfig& cfg = {});

}  // namespace qineq
