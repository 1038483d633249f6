#pragma once

// Flattened logistic distribution (FLD) and its exponentiated version (EFLD):
// quantiles, sampling, moments and the closed-form qZ/qD oracle.
//
//   Q(p) = alpha + beta [log(p / (1 - p)) + kappa p]

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "qineq/inequality.hpp"
#include "qineq/pwl_surface.hpp"

namespace qineq {

struct FldParams {
  double alpha = 0.0;
  double beta = 1.0;   ///< scale, > 0
  double kappa = 0.0;  ///< shape, >= 0

  void validate() const;
};

/// Conditional EFLD family with kappa = gamma * x.
struct EfldModel {
  double alpha = 0.5;
  double beta = 0.2;
  double gamma = 0.1;

  FldParams at(double x) const { return FldParams{alpha, beta, gamma * x}; }
};

double fld_quantile(const FldParams& params, double p);

/// exp(Q_FLD) on [0, 1) as a quantile handle; Q(0) = 0.
QuantileFn efld_quantile_fn(const FldParams& params);

/// Seeds a 64-bit Mersenne Twister through splitmix64 so nearby seeds give
/// unrelated streams.
std::mt19937_64 make_rng(std::uint64_t seed);

/// Uniform draw strictly inside (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& rng);

struct EfldSample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// x ~ U(lo, hi), then y = exp(Q_FLD(u; alpha, beta, gamma x)) with u ~ U(0, 1).
EfldSample efld_sample(const EfldModel& model, double x_lo, double x_hi, int n, std::uint64_t seed);

/// Confluent hypergeometric 1F1(a; b; z) by its power series.
double hyp1f1(double a, double b, double z, int max_terms = 10000);

/// E[Y^r] for Y ~ EFLD(alpha, beta, kappa); throws InfiniteMomentError when
/// r * beta >= 1.
double efld_moment(double r, const FldParams& params);

struct MeanVariance {
  double mean;
  double variance;
};

/// Mean and variance of the (non-exponentiated) FLD.
MeanVariance fld_mean_var(const FldParams& params);

/// Closed-form qZ / qD of EFLD(alpha, beta, gx) at p in (0, 1); alpha cancels.
double efld_true_curve(CurveKind kind, double beta, double gx, double p);

/// Simpson integral of efld_true_curve with the boundary anchors.
double efld_true_index(CurveKind kind, double beta, double gx, int n_points = kDefaultCurvePoints);

/// The exact coefficient functions beta_0(p) = alpha + beta logit(p),
/// beta_1(p) = beta gamma p sampled at the grid knots.
BetaSurface efld_true_surface(const EfldModel& model, const ProbGrid& grid);

}  // namespace qineq
