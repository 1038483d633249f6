#include "qineq/fld.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qineq/errors.hpp"

namespace qineq {

void FldParams::validate() const {
  if (!(beta > 0.0)) throw DomainError("FLD: beta must be positive");
  if (!(kappa >= 0.0)) throw DomainError("FLD: kappa must be nonnegative");
  if (!std::isfinite(alpha)) throw DomainError("FLD: alpha must be finite");
}

double fld_quantile(const FldParams& params, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("fld_quantile: p=" + std::to_string(p) + " must lie strictly inside (0, 1)");
  return params.alpha + params.beta * (std::log(p / (1.0 - p)) + params.kappa * p);
}

QuantileFn efld_quantile_fn(const FldParams& params) {
  params.validate();
  return QuantileFn{[params](double p) { return p == 0.0 ? 0.0 : std::exp(fld_quantile(params, p)); },
                    1.0};
}

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL;
  s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ULL;
  s = (s ^ (s >> 27)) * 0x94D049BB133111EBULL;
  s ^= s >> 31;
  return std::mt19937_64(s);
}

double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

EfldSample efld_sample(const EfldModel& model, double x_lo, double x_hi, int n, std::uint64_t seed) {
  if (n < 1) throw ContractError("efld_sample: n must be >= 1");
  if (!(x_hi >= x_lo)) throw ContractError("efld_sample: empty covariate range");
  auto rng = make_rng(seed);
  EfldSample s{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    const double x = x_lo + (x_hi - x_lo) * open_uniform(rng);
    const double u = open_uniform(rng);
    s.x(i) = x;
    s.y(i) = std::exp(fld_quantile(model.at(x), u));
  }
  return s;
}

double hyp1f1(double a, double b, double z, int max_terms) {
  if (b <= 0.0 && b == std::floor(b))
    throw DomainError("hyp1f1: b must not be a nonpositive integer");
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < max_terms; ++k) {
    const double ratio = (a + k) / ((b + k) * (k + 1)) * z;
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;
    const double next_ratio = std::abs((a + k + 1) / ((b + k + 1) * (k + 2)) * z);
    if (next_ratio < 1.0) {
      const double tail = std::abs(term) * next_ratio / (1.0 - next_ratio);
      if (tail <= 1e-12 * std::abs(sum)) return sum;
    }
  }
  throw ConvergenceError("hyp1f1: series did not converge within " + std::to_string(max_terms) +
                         " terms");
}

double efld_moment(double r, const FldParams& params) {
  params.validate();
  if (!(r > 0.0)) throw DomainError("efld_moment: r must be positive");
  const double rb = r * params.beta;
  if (rb >= 1.0)
    throw InfiniteMomentError("efld_moment: moment of order " + std::to_string(r) +
                              " is infinite for beta=" + std::to_string(params.beta));
  const double pi = std::numbers::pi;
  return std::exp(r * params.alpha) * hyp1f1(1.0 + rb, 2.0, rb * params.kappa) * (pi * rb) /
         std::sin(pi * rb);
}

MeanVariance fld_mean_var(const FldParams& params) {
  params.validate();
  const double k = params.kappa;
  const double pi = std::numbers::pi;
  return MeanVariance{params.alpha + params.beta * k / 2.0,
                      params.beta * params.beta * (k + k * k / 12.0 + pi * pi / 3.0)};
}

double efld_true_curve(CurveKind kind, double beta, double gx, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("efld_true_curve: p must lie inside (0, 1)");
  if (kind == CurveKind::QZ)
    return 1.0 - std::pow(p * (1.0 - p) / ((1.0 + p) * (2.0 - p)), beta) * std::exp(-beta * gx / 2.0);
  return 1.0 - std::pow(p / (2.0 - p), 2.0 * beta) * std::exp(beta * gx * (p - 1.0));
}

double efld_true_index(CurveKind kind, double beta, double gx, int n_points) {
  if (n_points < 3 || n_points % 2 == 0)
    throw ContractError("efld_true_index: n_points must be odd and >= 3");
  std::vector<double> v(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double p = static_cast<double>(k) / (n_points - 1);
    if (k == 0) {
      v[0] = 1.0;
    } else if (k == n_points - 1) {
      v[static_cast<std::size_t>(k)] = kind == CurveKind::QZ ? 1.0 : 0.0;
    } else {
      v[static_cast<std::size_t>(k)] = efld_true_curve(kind, beta, gx, p);
    }
  }
  return simpson(v, 0.0, 1.0);
}

BetaSurface efld_true_surface(const EfldModel& model, const ProbGrid& grid) {
  Eigen::MatrixXd c(grid.size(), 2);
  for (int j = 0; j < grid.size(); ++j) {
    const double p = grid.knot(j);
    c(j, 0) = model.alpha + model.beta * (std::log(p) - std::log(1.0 - p));
    c(j, 1) = model.beta * model.gamma * p;
  }
  return BetaSurface(grid, std::move(c));
}

}  // namespace qineq
