#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "qineq/errors.hpp"
#include "qineq/fld.hpp"
#include "qineq/qr_core.hpp"

using namespace qineq;

namespace {

Dataset intercept_only(std::vector<double> z) {
  const auto n = static_cast<Eigen::Index>(z.size());
  return Dataset(Eigen::MatrixXd::Ones(n, 1), Eigen::Map<Eigen::VectorXd>(z.data(), n));
}

Dataset with_covariate(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  Eigen::MatrixXd X(x.size(), 2);
  X.col(0).setOnes();
  X.col(1) = x;
  return Dataset(X, z);
}

// Some optimal d = 1 fit passes through two observations.
double brute_force_line(const Dataset& data, double p) {
  double best = std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd& X = data.X();
  for (int i = 0; i < data.n(); ++i)
    for (int k = i + 1; k < data.n(); ++k) {
      if (X(i, 1) == X(k, 1)) continue;
      const double slope = (data.z()(k) - data.z()(i)) / (X(k, 1) - X(i, 1));
      const Eigen::Vector2d b(data.z()(i) - slope * X(i, 1), slope);
      best = std::min(best, check_objective(data, p, b));
    }
  return best;
}

}  // namespace

TEST_CASE("check loss") {
  CHECK(check_loss(1.0, 0.3) == doctest::Approx(0.3));
  CHECK(check_loss(-1.0, 0.3) == doctest::Approx(0.7));
  CHECK(check_loss(0.0, 0.9) == 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double v = 20.0 * u(rng) - 10.0, p = u(rng);
    CHECK(check_loss(v, p) == doctest::Approx((std::abs(v) + (2 * p - 1) * v) / 2).epsilon(1e-14));
    CHECK(check_loss(v, p) >= 0.0);
  }
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset(Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Zero(2)), ContractError);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 2);
  X(2, 0) = 0.5;
  CHECK_THROWS_AS(Dataset(X, Eigen::VectorXd::Zero(4)), ContractError);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  z(1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Dataset(Eigen::MatrixXd::Ones(4, 2), z), ContractError);
  CHECK_THROWS_AS(Dataset(Eigen::MatrixXd::Ones(4, 1), Eigen::VectorXd::Zero(3)), ContractError);

  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 3.0;
  try {
    Dataset::from_responses(Eigen::MatrixXd::Zero(3, 1), y);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  const Dataset ok = Dataset::from_responses(Eigen::MatrixXd::Constant(3, 1, 2.0), Eigen::Vector3d(1, std::exp(1.0), 2));
  CHECK(ok.z()(1) == doctest::Approx(1.0));
  CHECK(ok.X()(0, 0) == 1.0);
  CHECK(ok.X()(0, 1) == 2.0);
}

TEST_CASE("oqr_fit examples") {
  const FitResult med = oqr_fit(intercept_only({1, 2, 3}), 0.5);
  CHECK(med.beta(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(med.status == FitStatus::Optimal);
  // Brute-force grid search over the intercept.
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  const Dataset d3 = intercept_only({1, 2, 3});
  for (int k = 0; k <= 4000; ++k) {
    const double b = k / 1000.0;
    const double v = check_objective(d3, 0.5, Eigen::VectorXd::Constant(1, b));
    if (v < best) best = v, arg = b;
  }
  CHECK(arg == doctest::Approx(2.0));
  CHECK(med.objective == doctest::Approx(best).epsilon(1e-12));

  for (double p : {0.1, 0.5, 0.77}) {
    const FitResult f = oqr_fit(intercept_only({5, 5, 5, 5}), p);
    CHECK(f.beta(0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(f.objective == doctest::Approx(0.0));
  }

  Eigen::VectorXd x(6), z(6);
  x << 0, 1, 2, 3, 4, 5;
  z = (1.0 + 2.0 * x.array()).matrix();
  for (double p : {0.2, 0.5, 0.9}) {
    const FitResult f = oqr_fit(with_covariate(x, z), p);
    CHECK(f.beta(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f.beta(1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.objective == doctest::Approx(0.0));
  }
  CHECK_THROWS(oqr_fit(intercept_only({1, 2, 3}), 1.0));
}

TEST_CASE("intercept-only fits reach the order-statistic objective") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 40;
    std::vector<double> z(static_cast<std::size_t>(n));
    for (auto& v : z) v = normal(rng);
    const double p = 0.05 + 0.9 * (t % 19) / 18.0;
    std::vector<double> s = z;
    std::sort(s.begin(), s.end());
    const int k = std::max(1, static_cast<int>(std::ceil(n * p - 1e-12)));
    const Dataset d = intercept_only(z);
    const double oracle = check_objective(d, p, Eigen::VectorXd::Constant(1, s[static_cast<std::size_t>(k - 1)]));
    const FitResult f = oqr_fit(d, p);
    CHECK(f.objective == doctest::Approx(oracle).epsilon(1e-12));
    // The minimizer set is the order-statistic bracket.
    CHECK(f.beta(0) >= s[static_cast<std::size_t>(k - 1)] - 1e-12);
    CHECK(f.beta(0) <= s[static_cast<std::size_t>(std::min(k, n - 1))] + 1e-12);
  }
}

TEST_CASE("d = 1 fits match the best line through two observations") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 60; ++t) {
    const int n = 4 + t % 25;
    Eigen::VectorXd x(n), z(n);
    for (int i = 0; i < n; ++i) {
      x(i) = 10.0 * u(rng);
      z(i) = 0.3 * x(i) + (1.0 + 0.2 * x(i)) * std::log(u(rng) / (1.0 - u(rng)));
    }
    const Dataset d = with_covariate(x, z);
    const double p = 0.05 + 0.9 * u(rng);
    const FitResult f = oqr_fit(d, p);
    CHECK(f.objective == doctest::Approx(brute_force_line(d, p)).epsilon(1e-10));
    CHECK(f.objective == doctest::Approx(check_objective(d, p, f.beta)).epsilon(1e-9));
  }
}

TEST_CASE("shift equivariance and optimality against the true coefficients") {
  const EfldModel model{0.5, 0.2, 0.3};
  const EfldSample s = efld_sample(model, 0.0, 30.0, 200, 12);
  const Dataset d = Dataset::from_responses(s.x, s.y);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (double p : {0.1, 0.35, 0.5, 0.8}) {
    const FitResult f = oqr_fit(d, p);
    const double c = u(rng);
    const FitResult g = oqr_fit(d.shifted(c), p);
    CHECK(g.beta(0) == doctest::Approx(f.beta(0) + c).epsilon(1e-9));
    CHECK(g.beta(1) == doctest::Approx(f.beta(1)).epsilon(1e-9));
    const Eigen::Vector2d truth(model.alpha + model.beta * std::log(p / (1 - p)), model.beta * model.gamma * p);
    CHECK(f.objective <= check_objective(d, p, truth) + 1e-12);
  }
}

TEST_CASE("oqr_fit_grid examples") {
  const ProbGrid g4(4);
  const SurfaceFit c = oqr_fit_grid(intercept_only(std::vector<double>(7, 2.5)), g4);
  for (int j = 0; j < 3; ++j) CHECK(c.surface.coeffs()(j, 0) == doctest::Approx(2.5));
  CHECK(c.all_optimal());

  std::vector<double> z;
  for (int v = 1; v <= 99; ++v) z.push_back(v);
  const SurfaceFit q = oqr_fit_grid(intercept_only(z), g4);
  CHECK(std::abs(q.surface.coeffs()(0, 0) - 25.0) <= 1.0);
  CHECK(std::abs(q.surface.coeffs()(1, 0) - 50.0) <= 1.0);
  CHECK(std::abs(q.surface.coeffs()(2, 0) - 75.0) <= 1.0);

  const EfldModel model{0.5, 0.1, 0.1};
  const EfldSample s = efld_sample(model, 0.0, 30.0, 500, 31);
  const ProbGrid g(20);
  const SurfaceFit f = oqr_fit_grid(Dataset::from_responses(s.x, s.y), g);
  const BetaSurface truth = efld_true_surface(model, g);
  CHECK((f.surface.coeffs() - truth.coeffs()).col(0).cwiseAbs().maxCoeff() < 0.15);
  CHECK((f.surface.coeffs() - truth.coeffs()).col(1).cwiseAbs().maxCoeff() < 0.15);
}

TEST_CASE("constrained fits") {
  const EfldSample s = efld_sample(EfldModel{0.5, 0.2, 0.3}, 0.0, 30.0, 120, 5);
  const Dataset d = Dataset::from_responses(s.x, s.y);
  const FitResult free = oqr_fit(d, 0.4);

  // Inactive constraint: same optimum.
  const LinearConstraints loose{Eigen::MatrixXd::Identity(2, 2), free.beta.array() - 10.0};
  const FitResult a = constrained_qr_fit(d, 0.4, loose);
  CHECK(a.objective == doctest::Approx(free.objective).epsilon(1e-9));

  // Active constraint on the slope.
  Eigen::MatrixXd G(1, 2);
  G << 0, 1;
  const LinearConstraints tight{G, Eigen::VectorXd::Constant(1, free.beta(1) + 0.05)};
  const FitResult b = constrained_qr_fit(d, 0.4, tight);
  CHECK(b.beta(1) >= free.beta(1) + 0.05 - 1e-9);
  CHECK(b.objective >= free.objective - 1e-9);
  CHECK(b.objective == doctest::Approx(check_objective(d, 0.4, b.beta)).epsilon(1e-9));

  // Joint fit over two orders with weights reproduces separate fits.
  const std::vector<double> orders{0.25, 0.75}, weights{1.0, 2.0};
  const JointFit j = constrained_qr_fit(d, orders, weights, LinearConstraints{});
  const double sep = oqr_fit(d, 0.25).objective + 2.0 * oqr_fit(d, 0.75).objective;
  CHECK(j.objective == doctest::Approx(sep).epsilon(1e-9));
  CHECK(j.beta.rows() == 2);
}
