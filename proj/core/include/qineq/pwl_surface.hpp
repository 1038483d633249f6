#pragma once

// Piecewise-linear coefficient surfaces on the uniform grid p_j = j/m and the
// conditional quantile functions Q_x(p) = exp(beta(p)^T (1, x)) built on them.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qineq {

/// Uniform probability grid with interior knots p_j = j/m, j = 1..m-1.
class ProbGrid {
 public:
  explicit ProbGrid(int m);

  int m() const noexcept { return m_; }
  /// Number of knots, m - 1.
  int size() const noexcept { return m_ - 1; }
  /// Knot by zero-based row index: knot(0) = 1/m, knot(size()-1) = (m-1)/m.
  double knot(int row) const;
  double first() const noexcept { return 1.0 / m_; }
  double last() const noexcept { return static_cast<double>(m_ - 1) / m_; }
  std::vector<double> knots() const;

  friend bool operator==(const ProbGrid&, const ProbGrid&) = default;

 private:
  int m_;
};

/// Coefficient functions beta_0..beta_d sampled at the grid knots.
/// Row j holds (beta_0(p_j), ..., beta_d(p_j)); column 0 is the intercept.
class BetaSurface {
 public:
  BetaSurface(ProbGrid grid, Eigen::MatrixXd coeffs);

  const ProbGrid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXd& coeffs() const noexcept { return coeffs_; }
  /// Covariate dimension d (number of columns minus the intercept).
  int dim() const noexcept { return static_cast<int>(coeffs_.cols()) - 1; }
  Eigen::VectorXd column(int i) const { return coeffs_.col(i); }

 private:
  ProbGrid grid_;
  Eigen::MatrixXd coeffs_;
};

/// Linear interpolation through (knots[k], values[k]).
double interp_eval(std::span<const double> knots, std::span<const double> values, double p);

/// Componentwise interpolation of the surface at p in [p_1, p_{m-1}].
Eigen::VectorXd beta_eval(const BetaSurface& surface, double p);

/// How Q_x is read between knots. Step is the left-continuous step function
/// Q(p) = Q(p_j) for p in (p_{j-1}, p_j], the classical reading of a finite
/// set of regression quantiles.
enum class Interpolation { Linear, Step };

/// Q_x for a fixed covariate vector. The linear predictor eta_j = beta(p_j)^T (1, x)
/// is cached at the knots; interpolating eta equals interpolating beta then
/// taking the inner product.
class CondQuantile {
 public:
  CondQuantile(BetaSurface surface, Eigen::VectorXd x, Interpolation mode = Interpolation::Linear);

  const BetaSurface& surface() const noexcept { return surface_; }
  const Eigen::VectorXd& x() const noexcept { return x_; }
  /// Linear predictor at each knot.
  const std::vector<double>& predictor() const noexcept { return eta_; }
  Interpolation mode() const noexcept { return mode_; }

  /// Smallest and largest order where the interpolated part is defined.
  double lower() const noexcept { return surface_.grid().first(); }
  double upper() const noexcept { return surface_.grid().last(); }

  /// Q_x(p) on the whole estimable range [0, p_{m-1}]: left tail below p_1,
  /// exp of the interpolated predictor above.
  double operator()(double p) const;

 private:
  friend double cond_quantile_eval(const CondQuantile&, double);
  BetaSurface surface_;
  Eigen::VectorXd x_;
  Interpolation mode_;
  std::vector<double> knots_;
  std::vector<double> eta_;
};

/// exp(beta(p)^T (1, x)) for p in [p_1, p_{m-1}], read per cq.mode().
double cond_quantile_eval(const CondQuantile& cq, double p);

/// Segment from (0, 0) to (p_1, Q_x(p_1)) for p in [0, p_1].
double left_tail_eval(const CondQuantile& cq, double p);

struct NoncrossingReport {
  bool ok = true;
  /// (index into xs, knot row j) where eta_j < eta_{j-1}.
  std::vector<std::pair<std::size_t, int>> violations;
};

/// Checks that the linear predictor is nondecreasing across knots for every
/// covariate vector in xs. Exact comparison, no tolerance.
NoncrossingReport check_noncrossing(const BetaSurface& surface,
                                    std::span<const Eigen::VectorXd> xs);

/// Convenience overload for d = 1 surfaces.
NoncrossingReport check_noncrossing(const BetaSurface& surface, std::span<const double> xs);

}  // namespace qineq
