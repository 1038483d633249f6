#include "qineq/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qineq/errors.hpp"

namespace qineq {

namespace {

Eigen::VectorXd with_intercept(const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size() + 1);
  out(0) = 1.0;
  out.tail(x.size()) = x;
  return out;
}

std::vector<Eigen::VectorXd> resolve_corners(const Dataset& data, const BaselineConfig& cfg) {
  std::vector<Eigen::VectorXd> corners = cfg.corner_set.empty() ? data_corners(data) : cfg.corner_set;
  for (const auto& c : corners)
    if (c.size() != data.d()) throw ContractError("baseline corner_set: wrong covariate dimension");
  return corners;
}

// Raises the intercept of row j until its predictor is at least that of row
// j-1 at every corner, with a small relative margin so that evaluation
// round-off at interior points cannot produce a spurious crossing.
void repair_upward(Eigen::MatrixXd& beta, int j, const std::vector<Eigen::VectorXd>& corners) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    double deficit = 0.0;
    double scale = 1.0;
    for (const auto& c : corners) {
      const Eigen::VectorXd ct = with_intercept(c);
      const double prev = beta.row(j - 1).dot(ct);
      const double cur = beta.row(j).dot(ct);
      scale = std::max({scale, std::abs(prev), std::abs(cur)});
      deficit = std::max(deficit, prev - cur);
    }
    if (deficit <= 0.0) return;
    beta(j, 0) += deficit + 1e-12 * scale;
  }
}

}  // namespace

std::vector<Eigen::VectorXd> box_corners(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size()) throw ContractError("box_corners: lo/hi size mismatch");
  const Eigen::Index d = lo.size();
  if (d > 20) throw ContractError("box_corners: too many covariates for corner enumeration");
  std::vector<Eigen::VectorXd> out;
  const std::size_t count = std::size_t{1} << d;
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Eigen::VectorXd c(d);
    for (Eigen::Index i = 0; i < d; ++i) c(i) = (mask >> i) & 1U ? hi(i) : lo(i);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Eigen::VectorXd> data_corners(const Dataset& data) {
  const Eigen::MatrixXd cov = data.X().rightCols(data.d());
  if (data.d() == 0) return {Eigen::VectorXd(0)};
  return box_corners(cov.colwise().minCoeff().transpose(), cov.colwise().maxCoeff().transpose());
}

int median_start_row(const ProbGrid& grid) {
  // m/2 for even m; (m-1)/2 = ceil((m-1)/2) for odd m.
  const int knot = grid.m() / 2;
  return knot - 1;
}

SurfaceFit cqr_fit_grid(const Dataset& data, const ProbGrid& grid) {
  const int rows = grid.size();
  const int q = data.d() + 1;
  Eigen::MatrixXd beta(rows, q);
  std::vector<FitStatus> status(static_cast<std::size_t>(rows));
  const int start = median_start_row(grid);

  const FitResult mid = oqr_fit(data, grid.knot(start));
  beta.row(start) = mid.beta.transpose();
  status[static_cast<std::size_t>(start)] = mid.status;

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(q, q);
  for (int j = start + 1; j < rows; ++j) {
    const Eigen::VectorXd prev = beta.row(j - 1).transpose();
    const FitResult f = constrained_qr_fit(data, grid.knot(j), LinearConstraints{I, prev});
    beta.row(j) = f.beta.cwiseMax(prev).transpose();
    status[static_cast<std::size_t>(j)] = f.status;
  }
  for (int j = start - 1; j >= 0; --j) {
    const Eigen::VectorXd next = beta.row(j + 1).transpose();
    const FitResult f = constrained_qr_fit(data, grid.knot(j), LinearConstraints{-I, -next});
    beta.row(j) = f.beta.cwiseMin(next).transpose();
    status[static_cast<std::size_t>(j)] = f.status;
  }
  return SurfaceFit{BetaSurface(grid, std::move(beta)), std::move(status)};
}

SurfaceFit wl1_fit_grid(const Dataset& data, const ProbGrid& grid, const BaselineConfig& cfg) {
  if (!(cfg.delta0 > 0.0)) throw ContractError("wl1_fit_grid: delta0 must be positive");
  const int d = data.d();
  const int q = d + 1;
  const std::vector<Eigen::VectorXd> corners = resolve_corners(data, cfg);

  // Rescale covariates so the enforcement box becomes [0, 1]^d.
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
  for (const auto& c : corners) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  Eigen::VectorXd range = hi - lo;
  for (Eigen::Index i = 0; i < d; ++i)
    if (!(range(i) > 0.0)) range(i) = 1.0;
  Eigen::MatrixXd Xs = data.X();
  for (Eigen::Index i = 0; i < d; ++i)
    Xs.col(i + 1) = ((Xs.col(i + 1).array() - lo(i)) / range(i)).matrix();
  const Dataset scaled(std::move(Xs), data.z());

  const std::vector<Eigen::VectorXd> unit = box_corners(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
  Eigen::MatrixXd C(static_cast<Eigen::Index>(unit.size()), q);
  for (std::size_t k = 0; k < unit.size(); ++k) C.row(static_cast<Eigen::Index>(k)) = with_intercept(unit[k]).transpose();

  const int rows = grid.size();
  Eigen::MatrixXd beta(rows, q);
  std::vector<FitStatus> status(static_cast<std::size_t>(rows));
  const int start = median_start_row(grid);
  const FitResult mid = oqr_fit(scaled, grid.knot(start));
  beta.row(start) = mid.beta.transpose();
  status[static_cast<std::size_t>(start)] = mid.status;

  const Eigen::VectorXd gap = Eigen::VectorXd::Constant(C.rows(), cfg.delta0);
  for (int j = start + 1; j < rows; ++j) {
    const Eigen::VectorXd prev = beta.row(j - 1).transpose();
    const FitResult f = constrained_qr_fit(scaled, grid.knot(j), LinearConstraints{C, C * prev + gap});
    beta.row(j) = f.beta.transpose();
    status[static_cast<std::size_t>(j)] = f.status;
  }
  for (int j = start - 1; j >= 0; --j) {
    const Eigen::VectorXd next = beta.row(j + 1).transpose();
    const FitResult f = constrained_qr_fit(scaled, grid.knot(j), LinearConstraints{-C, -(C * next) + gap});
    beta.row(j) = f.beta.transpose();
    status[static_cast<std::size_t>(j)] = f.status;
  }

  // Back to the original covariate scale.
  Eigen::MatrixXd out(rows, q);
  for (int j = 0; j < rows; ++j) {
    double intercept = beta(j, 0);
    for (Eigen::Index i = 0; i < d; ++i) {
      out(j, i + 1) = beta(j, i + 1) / range(i);
      intercept -= beta(j, i + 1) * lo(i) / range(i);
    }
    out(j, 0) = intercept;
  }
  return SurfaceFit{BetaSurface(grid, std::move(out)), std::move(status)};
}

SurfaceFit brw_fit_grid(const Dataset& data, const ProbGrid& grid, const BaselineConfig& cfg) {
  const int q = data.d() + 1;
  const int K = grid.size();
  const std::vector<Eigen::VectorXd> corners = resolve_corners(data, cfg);
  const auto nc = static_cast<Eigen::Index>(corners.size());

  // beta_j^T c~ - beta_{j-1}^T c~ >= 0 for j = 2..K at every corner.
  LinearConstraints cons{Eigen::MatrixXd::Zero((K - 1) * nc, K * q), Eigen::VectorXd::Zero((K - 1) * nc)};
  for (int j = 1; j < K; ++j) {
    for (Eigen::Index k = 0; k < nc; ++k) {
      const Eigen::VectorXd ct = with_intercept(corners[static_cast<std::size_t>(k)]);
      const Eigen::Index r = (j - 1) * nc + k;
      cons.G.block(r, j * q, 1, q) = ct.transpose();
      cons.G.block(r, (j - 1) * q, 1, q) = -ct.transpose();
    }
  }
  const std::vector<double> orders = grid.knots();
  const std::vector<double> weights(orders.size(), 1.0);
  JointFit jf = constrained_qr_fit(data, orders, weights, cons);
  for (int j = 1; j < K; ++j) repair_upward(jf.beta, j, corners);
  return SurfaceFit{BetaSurface(grid, std::move(jf.beta)),
                    std::vector<FitStatus>(static_cast<std::size_t>(K), jf.status)};
}

}  // namespace qineq
