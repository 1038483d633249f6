#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qineq/errors.hpp"
#include "qineq/fld.hpp"
#include "qineq/isotonic.hpp"
#include "qineq/pwl_surface.hpp"
#include "qineq/qr_core.hpp"

using namespace qineq;

namespace {

BetaSurface column_surface(int m, std::vector<double> col0) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(col0.size()), 1);
  for (std::size_t j = 0; j < col0.size(); ++j) c(static_cast<Eigen::Index>(j), 0) = col0[j];
  return BetaSurface(ProbGrid(m), c);
}

}  // namespace

TEST_CASE("grid knots are j/m") {
  const ProbGrid g(10);
  CHECK(g.size() == 9);
  CHECK(g.first() == doctest::Approx(0.1));
  CHECK(g.last() == doctest::Approx(0.9));
  for (int j = 0; j < g.size(); ++j) CHECK(g.knot(j) == static_cast<double>(j + 1) / 10);
  CHECK_THROWS_AS(ProbGrid(3), ContractError);
}

TEST_CASE("surface validates shape and finiteness") {
  CHECK_THROWS_AS(BetaSurface(ProbGrid(4), Eigen::MatrixXd::Zero(2, 2)), ContractError);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 2);
  c(1, 1) = std::nan("");
  CHECK_THROWS_AS(BetaSurface(ProbGrid(4), c), ContractError);
  CHECK(BetaSurface(ProbGrid(4), Eigen::MatrixXd::Zero(3, 2)).dim() == 1);
}

TEST_CASE("interp_eval examples") {
  const std::vector<double> k3{0.25, 0.5, 0.75}, v3{1, 2, 3};
  CHECK(interp_eval(k3, v3, 0.5) == 2.0);
  const std::vector<double> k2{0.25, 0.5}, v2{1, 3};
  CHECK(interp_eval(k2, v2, 0.375) == doctest::Approx(2.0).epsilon(1e-15));
  const std::vector<double> kk{0.2, 0.4, 0.6}, vv{0, 1, 5};
  CHECK(interp_eval(kk, vv, 0.55) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("interp_eval errors") {
  const std::vector<double> k{0.25, 0.5}, v{1, 3}, bad{1};
  CHECK_THROWS_AS(interp_eval(k, v, 0.2), DomainError);
  CHECK_THROWS_AS(interp_eval(k, v, 0.51), DomainError);
  CHECK_THROWS_AS(interp_eval(k, bad, 0.3), ContractError);
  const std::vector<double> unsorted{0.5, 0.25};
  CHECK_THROWS_AS(interp_eval(unsorted, v, 0.3), ContractError);
}

TEST_CASE("interp_eval is exact on knots and matches the two-point formula between them") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 10;
    std::vector<double> knots(static_cast<std::size_t>(n)), vals(knots.size());
    double acc = u(rng);
    for (std::size_t i = 0; i < knots.size(); ++i) {
      acc += 0.01 + u(rng);
      knots[i] = acc;
      vals[i] = 10.0 * u(rng) - 5.0;
    }
    for (std::size_t i = 0; i < knots.size(); ++i) CHECK(interp_eval(knots, vals, knots[i]) == vals[i]);
    const std::size_t k = static_cast<std::size_t>(u(rng) * (n - 1));
    const double w = u(rng);
    const double p = knots[k] + w * (knots[k + 1] - knots[k]);
    const double expect = vals[k] + (p - knots[k]) * (vals[k + 1] - vals[k]) / (knots[k + 1] - knots[k]);
    CHECK(interp_eval(knots, vals, p) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("beta_eval examples") {
  Eigen::MatrixXd c(3, 2);
  c << 1.5, -2.0, 1.5, -2.0, 1.5, -2.0;
  const BetaSurface flat(ProbGrid(4), c);
  CHECK(beta_eval(flat, 0.4)(0) == 1.5);
  CHECK(beta_eval(flat, 0.4)(1) == -2.0);

  const BetaSurface s = column_surface(4, {1, 2, 4});
  CHECK(beta_eval(s, 0.625)(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(beta_eval(s, 0.2), DomainError);
  CHECK_THROWS_AS(beta_eval(s, 0.8), DomainError);

  // Linear data is reproduced anywhere.
  const ProbGrid g(8);
  Eigen::MatrixXd lin(g.size(), 1);
  for (int j = 0; j < g.size(); ++j) lin(j, 0) = 3.0 * g.knot(j) - 1.0;
  const BetaSurface ls(g, lin);
  for (double p : {0.13, 0.5, 0.777}) CHECK(beta_eval(ls, p)(0) == doctest::Approx(3.0 * p - 1.0).epsilon(1e-13));
}

TEST_CASE("cond_quantile_eval examples") {
  const BetaSurface zero(ProbGrid(5), Eigen::MatrixXd::Zero(4, 2));
  const CondQuantile q0(zero, Eigen::VectorXd::Constant(1, 3.7));
  CHECK(cond_quantile_eval(q0, 0.5) == 1.0);

  const BetaSurface c0(ProbGrid(5), Eigen::MatrixXd::Constant(4, 1, 0.3));
  const CondQuantile qc(c0, Eigen::VectorXd(0));
  CHECK(cond_quantile_eval(qc, 0.33) == doctest::Approx(std::exp(0.3)).epsilon(1e-15));

  Eigen::MatrixXd c(4, 2);
  c.col(0).setConstant(0.5);
  c.col(1).setConstant(0.1);
  const CondQuantile q(BetaSurface(ProbGrid(5), c), Eigen::VectorXd::Constant(1, 2.0));
  CHECK(cond_quantile_eval(q, 0.6) == doctest::Approx(2.01375).epsilon(1e-5));
  CHECK_THROWS_AS(cond_quantile_eval(q, 0.1), DomainError);
  CHECK_THROWS_AS(CondQuantile(BetaSurface(ProbGrid(5), c), Eigen::VectorXd::Constant(2, 1.0)), ContractError);
}

TEST_CASE("left tail") {
  const ProbGrid g(10);
  Eigen::MatrixXd c(g.size(), 1);
  for (int j = 0; j < g.size(); ++j) c(j, 0) = std::log(4.0) + 0.1 * j;
  const CondQuantile q(BetaSurface(g, c), Eigen::VectorXd(0));
  CHECK(left_tail_eval(q, 0.0) == 0.0);
  CHECK(left_tail_eval(q, 0.1) == cond_quantile_eval(q, 0.1));
  CHECK(left_tail_eval(q, 0.05) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q(0.05) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(left_tail_eval(q, 0.11), DomainError);
}

TEST_CASE("Q is continuous and nondecreasing for monotone surfaces at nonnegative x") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const ProbGrid g(4 + t % 30);
    Eigen::MatrixXd c(g.size(), 3);
    for (int i = 0; i < 3; ++i) {
      double acc = u(rng) - 0.5;
      for (int j = 0; j < g.size(); ++j) c(j, i) = (acc += 0.2 * u(rng));
    }
    const Eigen::Vector2d x(5.0 * u(rng), 5.0 * u(rng));
    const CondQuantile q(BetaSurface(g, c), x);
    double prev = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double p = std::min(g.last(), g.last() * k / 400.0);
      const double v = q(p);
      CHECK(v >= prev);
      prev = v;
    }
    const double p = g.first() + 0.37 * (g.last() - g.first());
    CHECK(std::abs(q(p + 1e-9) - q(p - 1e-9)) < 1e-6 * q(p));
  }
}

TEST_CASE("step reading takes the value at the next knot") {
  const CondQuantile q(column_surface(4, {0.0, 1.0, 3.0}), Eigen::VectorXd(0), Interpolation::Step);
  CHECK(cond_quantile_eval(q, 0.25) == 1.0);
  CHECK(cond_quantile_eval(q, 0.26) == std::exp(1.0));
  CHECK(cond_quantile_eval(q, 0.5) == std::exp(1.0));
  CHECK(cond_quantile_eval(q, 0.5 + 1e-14) == std::exp(1.0));  // round-off above a knot
  CHECK(cond_quantile_eval(q, 0.75) == std::exp(3.0));
  CHECK(q(0.125) == doctest::Approx(0.5));
}

TEST_CASE("check_noncrossing") {
  const BetaSurface s = column_surface(4, {1.0, 0.5, 2.0});
  const std::vector<Eigen::VectorXd> at{Eigen::VectorXd(0)};
  const NoncrossingReport r = check_noncrossing(s, at);
  CHECK_FALSE(r.ok);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].second == 1);

  const BetaSurface iso = isotonize_surface(s);
  CHECK(check_noncrossing(iso, at).ok);
}

TEST_CASE("OQR on a small heteroscedastic sample crosses; its isotonized version does not") {
  const EfldModel model{0.5, 0.5, 0.5};
  const ProbGrid g(20);
  const std::vector<double> xs{0.0, 7.5, 15.0, 22.5, 30.0};
  int crossing = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const EfldSample s = efld_sample(model, 0.0, 30.0, 30, seed);
    const SurfaceFit f = oqr_fit_grid(Dataset::from_responses(s.x, s.y), g);
    crossing += check_noncrossing(f.surface, xs).ok ? 0 : 1;
    CHECK(check_noncrossing(isotonize_surface(f.surface), xs).ok);
  }
  CHECK(crossing >= 10);
}
