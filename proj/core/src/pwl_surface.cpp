#include "qineq/pwl_surface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qineq/errors.hpp"

namespace qineq {

namespace {

// Assumes knots strictly increasing and p within range.
double interp_unchecked(std::span<const double> knots, std::span<const double> values, double p) {
  const std::size_t last = knots.size() - 1;
  if (p >= knots[last]) return values[last];
  const auto it = std::upper_bound(knots.begin(), knots.end(), p);
  const std::size_t j = static_cast<std::size_t>(it - knots.begin()) - 1;
  if (p == knots[j]) return values[j];
  return values[j] + (p - knots[j]) * (values[j + 1] - values[j]) / (knots[j + 1] - knots[j]);
}

}  // namespace

ProbGrid::ProbGrid(int m) : m_(m) {
  if (m < 4) throw ContractError("ProbGrid: m must be >= 4, got " + std::to_string(m));
}

double ProbGrid::knot(int row) const {
  if (row < 0 || row >= size()) throw ContractError("ProbGrid::knot: row out of range");
  return static_cast<double>(row + 1) / m_;
}

std::vector<double> ProbGrid::knots() const {
  std::vector<double> out(static_cast<std::size_t>(size()));
  for (int j = 0; j < size(); ++j) out[static_cast<std::size_t>(j)] = static_cast<double>(j + 1) / m_;
  return out;
}

BetaSurface::BetaSurface(ProbGrid grid, Eigen::MatrixXd coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != grid_.size())
    throw ContractError("BetaSurface: expected " + std::to_string(grid_.size()) + " rows, got " +
                        std::to_string(coeffs_.rows()));
  if (coeffs_.cols() < 1) throw ContractError("BetaSurface: need at least the intercept column");
  if (!coeffs_.allFinite()) throw ContractError("BetaSurface: non-finite coefficient");
}

double interp_eval(std::span<const double> knots, std::span<const double> values, double p) {
  if (knots.size() != values.size()) throw ContractError("interp_eval: knots/values length mismatch");
  if (knots.size() < 2) throw ContractError("interp_eval: need at least two knots");
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k] > knots[k - 1])) throw ContractError("interp_eval: knots not strictly increasing");
  if (!(p >= knots.front() && p <= knots.back()))
    throw DomainError("interp_eval: p=" + std::to_string(p) + " outside knot range");
  return interp_unchecked(knots, values, p);
}

Eigen::VectorXd beta_eval(const BetaSurface& surface, double p) {
  const ProbGrid& g = surface.grid();
  if (!(p >= g.first() && p <= g.last()))
    throw DomainError("beta_eval: p=" + std::to_string(p) + " outside [p_1, p_{m-1}]");
  const std::vector<double> knots = g.knots();
  const Eigen::MatrixXd& c = surface.coeffs();
  Eigen::VectorXd out(c.cols());
  std::vector<double> col(knots.size());
  for (Eigen::Index i = 0; i < c.cols(); ++i) {
    for (std::size_t j = 0; j < knots.size(); ++j) col[j] = c(static_cast<Eigen::Index>(j), i);
    out(i) = interp_unchecked(knots, col, p);
  }
  return out;
}

CondQuantile::CondQuantile(BetaSurface surface, Eigen::VectorXd x, Interpolation mode)
    : surface_(std::move(surface)), x_(std::move(x)), mode_(mode) {
  if (x_.size() != surface_.dim())
    throw ContractError("CondQuantile: covariate vector has length " + std::to_string(x_.size()) +
                        ", surface dimension is " + std::to_string(surface_.dim()));
  knots_ = surface_.grid().knots();
  const Eigen::MatrixXd& c = surface_.coeffs();
  eta_.resize(knots_.size());
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    double v = c(j, 0);
    for (Eigen::Index i = 0; i < x_.size(); ++i) v += c(j, i + 1) * x_(i);
    eta_[static_cast<std::size_t>(j)] = v;
  }
}

double CondQuantile::operator()(double p) const {
  if (p < lower()) return left_tail_eval(*this, p);
  return cond_quantile_eval(*this, p);
}

double cond_quantile_eval(const CondQuantile& cq, double p) {
  if (!(p >= cq.lower() && p <= cq.upper()))
    throw DomainError("cond_quantile_eval: p=" + std::to_string(p) + " outside [p_1, p_{m-1}]");
  if (cq.mode_ == Interpolation::Step) {
    // Orders like 1 - p/2 land on knots up to round-off; snap them so the
    // jump is taken at the knot itself.
    const auto it = std::lower_bound(cq.knots_.begin(), cq.knots_.end(), p - 1e-12);
    return std::exp(cq.eta_[static_cast<std::size_t>(it - cq.knots_.begin())]);
  }
  return std::exp(interp_unchecked(cq.knots_, cq.eta_, p));
}

double left_tail_eval(const CondQuantile& cq, double p) {
  const double p1 = cq.lower();
  if (!(p >= 0.0 && p <= p1))
    throw DomainError("left_tail_eval: p=" + std::to_string(p) + " outside [0, p_1]");
  const double q1 = cond_quantile_eval(cq, p1);
  if (p == p1) return q1;
  return q1 * (p / p1);
}

NoncrossingReport check_noncrossing(const BetaSurface& surface,
                                    std::span<const Eigen::VectorXd> xs) {
  if (xs.empty()) throw ContractError("check_noncrossing: xs must be nonempty");
  NoncrossingReport report;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const CondQuantile cq(surface, xs[k]);
    const auto& eta = cq.predictor();
    for (std::size_t j = 1; j < eta.size(); ++j) {
      if (eta[j] < eta[j - 1]) {
        report.ok = false;
        report.violations.emplace_back(k, static_cast<int>(j));
      }
    }
  }
  return report;
}

NoncrossingReport check_noncrossing(const BetaSurface& surface, std::span<const double> xs) {
  std::vector<Eigen::VectorXd> vs;
  vs.reserve(xs.size());
  for (double x : xs) {
    Eigen::VectorXd v(1);
    v(0) = x;
    vs.push_back(std::move(v));
  }
  return check_noncrossing(surface, std::span<const Eigen::VectorXd>(vs));
}

}  // namespace qineq
