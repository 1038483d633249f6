// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qineq/errors.hpp"
#include "qineq/fld.hpp"
#include "qineq/inequality.hpp"
#include "qineq/isotonic.hpp"
#include "qineq/qr_core.hpp"
#include "qineq/simharness.hpp"
#include "qineq/smooth_qr.hpp"

using namespace qineq;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int workers() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome oracle_values() {
  const double a = efld_true_index(CurveKind::QD, 0.2, 0.1 * 1.0);
  const double b = efld_true_index(CurveKind::QD, 0.2, 0.1 * 30.0);
  const double c = efld_true_index(CurveKind::QD, 0.2, 0.3 * 30.0);
  const bool ok = std::abs(a - 0.377) <= 0.005 && std::abs(b - 0.500) <= 0.005 && std::abs(c - 0.659) <= 0.005;
  std::ostringstream s;
  s << "qDI=" << a << ", " << b << ", " << c;
  return {ok, s.str()};
}

Outcome cross_path() {
  const ProbGrid grid(200);
  std::map<CurveKind, double> worst{{CurveKind::QZ, 0.0}, {CurveKind::QD, 0.0}};
  for (double beta : {0.1, 0.2, 0.5})
    for (double gamma : {0.1, 0.3, 0.5}) {
      const EfldModel model{0.5, beta, gamma};
      const BetaSurface s = efld_true_surface(model, grid);
      for (double x : {1.0, 15.0, 30.0}) {
        const CondQuantile cq(s, Eigen::VectorXd::Constant(1, x));
        for (CurveKind kind : {CurveKind::QZ, CurveKind::QD}) {
          const double plug = index(kind, as_quantile_fn(cq)).value;
          worst[kind] = std::max(worst[kind], std::abs(plug - efld_true_index(kind, beta, gamma * x)));
        }
      }
    }
  std::ostringstream s;
  s << "max |plug-in - closed form|: qZI " << worst[CurveKind::QZ] << ", qDI " << worst[CurveKind::QD];
  return {worst[CurveKind::QZ] <= 2e-3 && worst[CurveKind::QD] <= 2e-3, s.str()};
}

Outcome d0_quantile() {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(2, 50);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const int n = size(rng);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = normal(rng);
    if (t % 5 == 0)
      for (int i = 0; i < n; ++i) z(i) = std::round(z(i) * 2.0);  // ties
    const Dataset data(Eigen::MatrixXd::Ones(n, 1), z);
    const double p = 0.1 * (1 + t % 9);
    std::vector<double> sorted(z.data(), z.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const int k = static_cast<int>(std::ceil(n * p - 1e-12));
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, sorted[static_cast<std::size_t>(std::max(k, 1) - 1)]);
    const double oracle = check_objective(data, p, q);
    const FitResult f = oqr_fit(data, p);
    worst = std::max(worst, std::abs(f.objective - oracle));
    worst = std::max(worst, std::abs(check_objective(data, p, f.beta) - oracle));
  }
  return {worst <= 1e-8, fmt("max objective gap = %.3g", worst)};
}

// Dominance of the sup error must hold globally. Strictness is checked per
// pooled block: a global strict inequality fails whenever the largest input
// error sits at an unpooled point (truth 0,0,0 and input 0.5,-0.5,3 pools the
// first two entries and leaves the sup error at 3).
Outcome pava_sup_error() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> size(4, 64);
  std::normal_distribution<double> normal;
  std::exponential_distribution<double> step(1.0);
  int weak_fail = 0, pooled_trials = 0, blocks_checked = 0, block_fail = 0, global_equal = 0;
  for (int t = 0; t < 1000; ++t) {
    const int m = size(rng);
    const double sigma = 0.05 + 2.0 * (t % 10) / 10.0;
    std::vector<double> xi(static_cast<std::size_t>(m - 1)), v(xi.size());
    double acc = normal(rng);
    for (std::size_t j = 0; j < xi.size(); ++j) {
      acc += (t % 7 == 0 && j % 3 == 0) ? 0.0 : 0.3 * step(rng);  // include flat stretches
      xi[j] = acc;
      v[j] = acc + sigma * normal(rng);
    }
    const IsotonicFit fit = pava(v);
    double in = 0.0, out = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
      in = std::max(in, std::abs(v[j] - xi[j]));
      out = std::max(out, std::abs(fit.values[j] - xi[j]));
    }
    if (out > in) ++weak_fail;
    if (fit.blocks.size() == xi.size()) continue;
    ++pooled_trials;
    if (!(out < in)) ++global_equal;
    for (const IsotonicBlock& b : fit.blocks) {
      if (b.end == b.start) continue;
      ++blocks_checked;
      double bin = 0.0, bout = 0.0;
      for (int j = b.start; j <= b.end; ++j) {
        const auto u = static_cast<std::size_t>(j);
        bin = std::max(bin, std::abs(v[u] - xi[u]));
        bout = std::max(bout, std::abs(fit.values[u] - xi[u]));
      }
      if (!(bout < bin)) ++block_fail;
    }
  }
  std::ostringstream s;
  s << "dominance violations " << weak_fail << "/1000; " << pooled_trials << " trials pooled, non-strict in "
    << block_fail << "/" << blocks_checked << " pooled blocks (global sup unchanged in " << global_equal << ")";
  return {weak_fail == 0 && block_fail == 0 && blocks_checked > 0, s.str()};
}

SimConfig base_config(EfldModel model, std::vector<int> ns, int reps, std::vector<Method> methods) {
  SimConfig cfg;
  cfg.params = {model};
  cfg.ns = std::move(ns);
  cfg.reps = reps;
  cfg.methods = std::move(methods);
  cfg.workers = workers();
  return cfg;
}

Outcome noncrossing() {
  const SimConfig cfg = base_config({0.5, 0.5, 0.5}, {50}, 200, all_methods());
  const SimResult res = run_experiment(cfg);
  std::map<Method, std::map<int, bool>> ok;  // method -> rep -> passes
  std::map<Method, int> failed_fits;
  for (const auto& r : res.records) {
    ok[r.method][r.rep] = r.noncrossing;
    if (r.failed && r.x == cfg.eval_xs.front() && r.kind == CurveKind::QZ) ++failed_fits[r.method];
  }
  bool pass = true;
  std::ostringstream s;
  for (Method m : all_methods()) {
    int crossing = 0;
    for (const auto& [rep, good] : ok[m]) crossing += good ? 0 : 1;
    s << to_string(m) << " crossing=" << crossing << " ";
    if (m == Method::BK) {
      pass = pass && crossing >= 1;
    } else {
      pass = pass && crossing == 0;
    }
  }
  for (const auto& [m, c] : failed_fits) s << to_string(m) << " failed=" << c << " ";
  return {pass, s.str()};
}

Outcome consistency() {
  SimConfig cfg = base_config({0.5, 0.1, 0.1}, {50, 500}, 200, {Method::IAQR});
  cfg.params.push_back({0.5, 0.2, 0.3});
  const SimResult res = run_experiment(cfg);
  std::map<std::tuple<int, double, int>, std::map<int, double>> cells;
  for (const auto& c : res.mse) cells[{c.param_id, c.x, static_cast<int>(c.kind)}][c.n] = c.mse;
  int bad = 0;
  double worst = 0.0;
  for (const auto& [key, by_n] : cells) {
    const double small = by_n.at(50), large = by_n.at(500);
    if (!(large < small)) ++bad;
    worst = std::max(worst, large / small);
  }
  std::ostringstream s;
  s << cells.size() << " cells, violations " << bad << ", max MSE(500)/MSE(50) = " << worst;
  return {bad == 0, s.str()};
}

Outcome aqr_oqr_limit() {
  SimConfig cfg = base_config({0.5, 0.2, 0.1}, {100}, 50, {Method::IOQR, Method::IAQR});
  cfg.tau = 1e-6;
  const SimResult res = run_experiment(cfg);
  std::map<std::pair<int, double>, std::map<Method, double>> est;
  int failed = 0;
  for (const auto& r : res.records) {
    if (r.kind != CurveKind::QD) continue;
    if (r.failed) ++failed;
    est[{r.rep, r.x}][r.method] = r.estimate;
  }
  double worst = 0.0;
  for (const auto& [key, m] : est) {
    const double d = std::abs(m.at(Method::IAQR) - m.at(Method::IOQR));
    worst = std::isfinite(d) ? std::max(worst, d) : INFINITY;
  }
  std::ostringstream s;
  s << "max |IAQR - IOQR| qDI = " << worst << ", failed records " << failed;
  return {worst <= 1e-3 && failed == 0, s.str()};
}

Outcome gradient() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 10 + static_cast<int>(unit(rng) * 60);
    const int d = 1 + t % 3;
    Eigen::MatrixXd X(n, d + 1);
    X.col(0).setOnes();
    for (int i = 0; i < n; ++i)
      for (int k = 1; k <= d; ++k) X(i, k) = 3.0 * unit(rng);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = normal(rng);
    const Dataset data(X, z);
    const double p = 0.02 + 0.96 * unit(rng);
    const double tau = std::pow(10.0, -2.0 + 2.5 * unit(rng));
    Eigen::VectorXd beta(d + 1);
    for (int k = 0; k <= d; ++k) beta(k) = 0.5 * normal(rng);
    const Eigen::VectorXd g = aqr_objective(data, p, tau, beta).gradient;
    Eigen::VectorXd fd(d + 1);
    for (int k = 0; k <= d; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(beta(k)));
      Eigen::VectorXd bp = beta, bm = beta;
      bp(k) += h;
      bm(k) -= h;
      fd(k) = (aqr_objective(data, p, tau, bp).value - aqr_objective(data, p, tau, bm).value) / (2.0 * h);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, fd.norm()));
  }
  return {worst < 1e-5, fmt("max relative gradient error = %.3g", worst)};
}

Outcome moments() {
  bool pass = true;
  std::ostringstream s;
  for (double kappa : {0.0, 1.0, 3.0}) {
    const FldParams prm{0.0, 0.2, kappa};
    std::mt19937_64 rng = make_rng(1000 + static_cast<std::uint64_t>(kappa));
    const int N = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < N; ++i) {
      const double y = std::exp(fld_quantile(prm, open_uniform(rng)));
      sum += y;
      sq += y * y;
    }
    const double mean = sum / N;
    const double se = std::sqrt((sq / N - mean * mean) / N);
    const double m1 = efld_moment(1.0, prm);
    const double zscore = std::abs(mean - m1) / se;
    pass = pass && zscore <= 3.0;
    s << "kappa=" << kappa << " z=" << fmt("%.2f", zscore) << " ";
  }
  bool threw = false;
  try {
    efld_moment(5.0, FldParams{0.0, 0.2, 1.0});
  } catch (const InfiniteMomentError&) {
    threw = true;
  }
  s << (threw ? "infinite moment raised" : "infinite moment NOT raised");
  return {pass && threw, s.str()};
}

Outcome bk_overestimation() {
  const SimConfig cfg = base_config({0.5, 0.1, 0.5}, {500}, 200, {Method::BK, Method::IAQR});
  const SimResult res = run_experiment(cfg);
  std::map<Method, std::pair<double, int>> acc;
  for (const auto& r : res.records) {
    if (r.kind != CurveKind::QD || r.x != 30.0 || r.failed) continue;
    acc[r.method].first += r.error;
    acc[r.method].second += 1;
  }
  const double bk = acc[Method::BK].first / acc[Method::BK].second;
  const double iaqr = acc[Method::IAQR].first / acc[Method::IAQR].second;
  std::ostringstream s;
  s << "mean qDI error at x=30: BK " << bk << " (" << acc[Method::BK].second << " reps), IAQR " << iaqr << " ("
    << acc[Method::IAQR].second << " reps)";
  return {bk > iaqr, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 oracle index values", oracle_values},
      {"2 plug-in vs closed form", cross_path},
      {"3 intercept-only fit is a sample quantile", d0_quantile},
      {"4 isotonic sup-error dominance", pava_sup_error},
      {"5 non-crossing guarantee", noncrossing},
      {"6 IAQR MSE decreases with n", consistency},
      {"7 IAQR approaches IOQR as tau -> 0", aqr_oqr_limit},
      {"8 AQR gradient vs finite differences", gradient},
      {"9 EFLD first moment", moments},
      {"10 BK overestimates qDI", bk_overestimation},
  };
  // Optional argument: run only the criterion with this number.
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && only != static_cast<int>(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-44s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", criteria[i].first, secs, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
