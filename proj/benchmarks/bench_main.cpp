#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qineq/baselines.hpp"
#include "qineq/fld.hpp"
#include "qineq/inequality.hpp"
#include "qineq/isotonic.hpp"
#include "qineq/qr_core.hpp"
#include "qineq/smooth_qr.hpp"

using namespace qineq;

namespace {

Dataset sample_data(int n) {
  const EfldSample s = efld_sample(EfldModel{0.5, 0.2, 0.3}, 0.0, 30.0, n, 7);
  return Dataset::from_responses(s.x, s.y);
}

void BM_OqrFit(benchmark::State& state) {
  const Dataset data = sample_data(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(oqr_fit(data, 0.3));
}
BENCHMARK(BM_OqrFit)->Arg(50)->Arg(500)->Arg(5000);

void BM_OqrGrid(benchmark::State& state) {
  const Dataset data = sample_data(static_cast<int>(state.range(0)));
  const ProbGrid grid(20);
  for (auto _ : state) benchmark::DoNotOptimize(oqr_fit_grid(data, grid));
}
BENCHMARK(BM_OqrGrid)->Arg(50)->Arg(500);

void BM_AqrFit(benchmark::State& state) {
  const Dataset data = sample_data(static_cast<int>(state.range(0)));
  const double tau = tau_default(data, TauRule::IqrRegression).tau;
  for (auto _ : state) benchmark::DoNotOptimize(aqr_fit(data, 0.3, tau));
}
BENCHMARK(BM_AqrFit)->Arg(50)->Arg(500)->Arg(5000);

void BM_BrwGrid(benchmark::State& state) {
  const Dataset data = sample_data(static_cast<int>(state.range(0)));
  const ProbGrid grid(20);
  for (auto _ : state) benchmark::DoNotOptimize(brw_fit_grid(data, grid));
}
BENCHMARK(BM_BrwGrid)->Arg(50)->Arg(500);

void BM_Pava(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.01 * static_cast<double>(i) + normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(pava(v));
}
BENCHMARK(BM_Pava)->Arg(20)->Arg(1000)->Arg(100000);

void BM_Index(benchmark::State& state) {
  const BetaSurface s = efld_true_surface(EfldModel{0.5, 0.2, 0.3}, ProbGrid(100));
  const CondQuantile cq(s, Eigen::VectorXd::Constant(1, 15.0));
  const QuantileFn q = as_quantile_fn(cq);
  const int n_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(index(CurveKind::QD, q, n_points));
}
BENCHMARK(BM_Index)->Arg(201)->Arg(2001);

}  // namespace

BENCHMARK_MAIN();
