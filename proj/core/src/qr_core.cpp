#include "qineq/qr_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseCore>

#include "qineq/errors.hpp"
#include "qineq/lp.hpp"

namespace qineq {

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd z) : X_(std::move(X)), z_(std::move(z)) {
  if (X_.rows() != z_.size()) throw ContractError("Dataset: X and z row counts differ");
  if (X_.cols() < 1) throw ContractError("Dataset: X needs an intercept column");
  if (X_.rows() < X_.cols() + 1)
    throw ContractError("Dataset: need n >= d + 2 observations, got n=" +
                        std::to_string(X_.rows()));
  if (!X_.allFinite() || !z_.allFinite()) throw ContractError("Dataset: non-finite entries");
  if ((X_.col(0).array() != 1.0).any()) throw ContractError("Dataset: column 0 must be all ones");
}

Dataset Dataset::from_responses(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& y) {
  if (covariates.rows() != y.size()) throw ContractError("Dataset: covariate/response length mismatch");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!(y(i) > 0.0))
      throw DomainError("Dataset: response must be positive (row " + std::to_string(i + 1) + ")");
  Eigen::MatrixXd X(covariates.rows(), covariates.cols() + 1);
  X.col(0).setOnes();
  X.rightCols(covariates.cols()) = covariates;
  return Dataset(std::move(X), y.array().log().matrix());
}

Dataset Dataset::shifted(double c) const {
  return Dataset(X_, (z_.array() + c).matrix());
}

std::string_view to_string(FitStatus status) noexcept {
  switch (status) {
    case FitStatus::Optimal: return "optimal";
    case FitStatus::MaxIterations: return "max_iterations";
    case FitStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

bool SurfaceFit::all_optimal() const noexcept {
  for (FitStatus s : status)
    if (s != FitStatus::Optimal) return false;
  return true;
}

double check_loss(double u, double p) noexcept { return u >= 0.0 ? p * u : (p - 1.0) * u; }

double check_objective(const Dataset& data, double p, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd r = data.z() - data.X() * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += check_loss(r(i), p);
  return s;
}

JointFit constrained_qr_fit(const Dataset& data, std::span<const double> orders,
                            std::span<const double> weights, const LinearConstraints& constraints) {
  const Eigen::Index K = static_cast<Eigen::Index>(orders.size());
  if (K == 0) throw ContractError("constrained_qr_fit: no quantile orders");
  if (weights.size() != orders.size()) throw ContractError("constrained_qr_fit: weights/orders mismatch");
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.d() + 1;
  const Eigen::Index rows = K * q;
  const Eigen::Index ncon = constraints.G.rows();
  if (ncon > 0 && constraints.G.cols() != rows)
    throw ContractError("constrained_qr_fit: constraint matrix has wrong column count");
  if (constraints.h.size() != ncon) throw ContractError("constrained_qr_fit: G/h mismatch");
  for (Eigen::Index k = 0; k < K; ++k) {
    const double p = orders[static_cast<std::size_t>(k)];
    if (!(p > 0.0 && p < 1.0)) throw DomainError("constrained_qr_fit: order outside (0, 1)");
    if (!(weights[static_cast<std::size_t>(k)] > 0.0))
      throw ContractError("constrained_qr_fit: weights must be positive");
  }

  // Dual: max sum_k z^T a_k + h^T lambda
  //   s.t. X^T a_k + (G^T lambda)_k = 0,  a_k in [w_k (p_k - 1), w_k p_k],  lambda >= 0.
  const Eigen::Index cols = K * n + ncon;
  lp::Problem pb;
  pb.b = Eigen::VectorXd::Zero(rows);
  pb.c.resize(cols);
  pb.lower.resize(cols);
  pb.upper.resize(cols);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(K * n * q + ncon * rows));
  const Eigen::MatrixXd& X = data.X();
  for (Eigen::Index k = 0; k < K; ++k) {
    const double p = orders[static_cast<std::size_t>(k)];
    const double w = weights[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index col = k * n + i;
      for (Eigen::Index c = 0; c < q; ++c)
        if (X(i, c) != 0.0) trips.emplace_back(k * q + c, col, X(i, c));
      pb.c(col) = -data.z()(i);
      pb.lower(col) = w * (p - 1.0);
      pb.upper(col) = w * p;
    }
  }
  for (Eigen::Index l = 0; l < ncon; ++l) {
    const Eigen::Index col = K * n + l;
    for (Eigen::Index r = 0; r < rows; ++r)
      if (constraints.G(l, r) != 0.0) trips.emplace_back(r, col, constraints.G(l, r));
    pb.c(col) = -constraints.h(l);
    pb.lower(col) = 0.0;
    pb.upper(col) = std::numeric_limits<double>::infinity();
  }
  pb.A.resize(rows, cols);
  pb.A.setFromTriplets(trips.begin(), trips.end());
  pb.A.makeCompressed();

  const lp::Solution sol = lp::solve(pb);

  JointFit out;
  out.beta.resize(K, q);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index c = 0; c < q; ++c) out.beta(k, c) = -sol.duals(k * q + c);

  double primal = 0.0;
  for (Eigen::Index k = 0; k < K; ++k)
    primal += weights[static_cast<std::size_t>(k)] *
              check_objective(data, orders[static_cast<std::size_t>(k)], out.beta.row(k).transpose());
  out.objective = primal;

  switch (sol.status) {
    case lp::Status::Optimal: {
      const double dual = -sol.objective;
      const double gap = std::abs(primal - dual);
      out.status = gap <= 1e-9 * (1.0 + std::abs(primal)) ? FitStatus::Optimal : FitStatus::Degenerate;
      break;
    }
    case lp::Status::IterationLimit: out.status = FitStatus::MaxIterations; break;
    default: out.status = FitStatus::Degenerate; break;
  }
  return out;
}

FitResult constrained_qr_fit(const Dataset& data, double p, const LinearConstraints& constraints) {
  const double order[1] = {p};
  const double weight[1] = {1.0};
  JointFit jf = constrained_qr_fit(data, order, weight, constraints);
  return FitResult{jf.beta.row(0).transpose(), jf.objective, jf.status};
}

FitResult oqr_fit(const Dataset& data, double p) {
  return constrained_qr_fit(data, p, LinearConstraints{});
}

SurfaceFit oqr_fit_grid(const Dataset& data, const ProbGrid& grid) {
  Eigen::MatrixXd coeffs(grid.size(), data.d() + 1);
  std::vector<FitStatus> status(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) {
    const FitResult f = oqr_fit(data, grid.knot(j));
    coeffs.row(j) = f.beta.transpose();
    status[static_cast<std::size_t>(j)] = f.status;
  }
  return SurfaceFit{BetaSurface(grid, std::move(coeffs)), std::move(status)};
}

}  // namespace qineq
