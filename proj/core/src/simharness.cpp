#include "qineq/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <tuple>

#include "qineq/errors.hpp"
#include "qineq/isotonic.hpp"

namespace qineq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Unit {
  int param_id;
  int n;
  int rep;
};

bool surface_failed(const SurfaceFit& f) {
  return std::any_of(f.status.begin(), f.status.end(),
                     [](FitStatus s) { return s == FitStatus::Degenerate; });
}

std::vector<SimRecord> run_unit(const SimConfig& cfg, const Unit& u) {
  const EfldModel& model = cfg.params[static_cast<std::size_t>(u.param_id)];
  const EfldSample s = efld_sample(model, cfg.x_lo, cfg.x_hi, u.n, replicate_seed(cfg.base_seed, u.rep));
  const Dataset data = Dataset::from_responses(s.x, s.y);
  const ProbGrid grid(cfg.m);

  FitOptions opts;
  opts.tau = cfg.tau;
  opts.tau_rule = cfg.tau_rule;
  if (cfg.enforce_on_support) {
    const double lo = std::min({cfg.x_lo, s.x.minCoeff(), *std::min_element(cfg.eval_xs.begin(), cfg.eval_xs.end())});
    const double hi = std::max({cfg.x_hi, s.x.maxCoeff(), *std::max_element(cfg.eval_xs.begin(), cfg.eval_xs.end())});
    opts.baseline.corner_set = {Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)};
  }

  std::optional<SurfaceFit> oqr;
  std::vector<SimRecord> out;
  out.reserve(cfg.methods.size() * cfg.eval_xs.size() * 2);
  for (Method method : cfg.methods) {
    bool failed = false;
    std::optional<BetaSurface> surface;
    try {
      if (method == Method::BK || method == Method::IOQR) {
        if (!oqr) oqr = oqr_fit_grid(data, grid);
        failed = surface_failed(*oqr);
        surface = method == Method::BK ? oqr->surface : isotonize_surface(oqr->surface);
      } else {
        MethodFit mf = fit_surface(method, data, grid, opts);
        failed = surface_failed(mf.fit);
        surface = std::move(mf.fit.surface);
      }
    } catch (const std::exception&) {
      failed = true;
    }

    bool noncrossing = false;
    if (surface) noncrossing = check_noncrossing(*surface, std::span<const double>(cfg.eval_xs)).ok;

    for (double x : cfg.eval_xs) {
      for (CurveKind kind : {CurveKind::QZ, CurveKind::QD}) {
        const double truth = efld_true_index(kind, model.beta, model.gamma * x, cfg.n_points);
        double est = kNaN;
        bool rec_failed = failed || !surface;
        if (!rec_failed) {
          try {
            const CondQuantile cq(*surface, Eigen::VectorXd::Constant(1, x), interpolation_for(method));
            est = index(kind, as_quantile_fn(cq), cfg.n_points).value;
          } catch (const std::exception&) {
            rec_failed = true;
          }
          if (!std::isfinite(est)) rec_failed = true;
        }
        out.push_back(SimRecord{u.param_id, u.n, method, x, kind, u.rep, est, truth,
                                rec_failed ? kNaN : est - truth, rec_failed, noncrossing});
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::BK: return "BK";
    case Method::IOQR: return "IOQR";
    case Method::IAQR: return "IAQR";
    case Method::CQR: return "CQR";
    case Method::WL1: return "WL1";
    case Method::BRW: return "BRW";
  }
  return "?";
}

Interpolation interpolation_for(Method method) noexcept {
  return method == Method::BK ? Interpolation::Step : Interpolation::Linear;
}

Method parse_method(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Method m : all_methods())
    if (s == to_string(m)) return m;
  throw ParseError("unknown method '" + std::string(text) + "' (expected BK, IOQR, IAQR, CQR, WL1 or BRW)");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::BK,  Method::IOQR, Method::IAQR,
                                           Method::CQR, Method::WL1,  Method::BRW};
  return methods;
}

MethodFit fit_surface(Method method, const Dataset& data, const ProbGrid& grid, const FitOptions& options) {
  switch (method) {
    case Method::BK: return MethodFit{oqr_fit_grid(data, grid), std::nullopt};
    case Method::IOQR: {
      SurfaceFit f = oqr_fit_grid(data, grid);
      return MethodFit{SurfaceFit{isotonize_surface(f.surface), std::move(f.status)}, std::nullopt};
    }
    case Method::IAQR: {
      TauChoice tc = options.tau ? TauChoice{*options.tau, options.tau_rule}
                                 : tau_default(data, options.tau_rule);
      AqrOptions ao;
      ao.kind = options.smooth_kind;
      SurfaceFit f = aqr_fit_grid(data, grid, tc.tau, ao);
      return MethodFit{SurfaceFit{isotonize_surface(f.surface), std::move(f.status)}, tc};
    }
    case Method::CQR: return MethodFit{cqr_fit_grid(data, grid), std::nullopt};
    case Method::WL1: return MethodFit{wl1_fit_grid(data, grid, options.baseline), std::nullopt};
    case Method::BRW: return MethodFit{brw_fit_grid(data, grid, options.baseline), std::nullopt};
  }
  throw ContractError("fit_surface: unknown method");
}

void SimConfig::validate() const {
  if (params.empty()) throw ContractError("SimConfig: params must be nonempty");
  for (const auto& p : params) {
    if (!(p.beta > 0.0)) throw ContractError("SimConfig: beta must be positive");
    if (!(p.gamma >= 0.0)) throw ContractError("SimConfig: gamma must be nonnegative");
  }
  if (ns.empty()) throw ContractError("SimConfig: ns must be nonempty");
  for (int n : ns)
    if (n < 3) throw ContractError("SimConfig: sample sizes must be >= 3");
  if (reps < 1) throw ContractError("SimConfig: reps must be >= 1");
  if (methods.empty()) throw ContractError("SimConfig: methods must be nonempty");
  if (m < 4) throw ContractError("SimConfig: m must be >= 4");
  if (eval_xs.empty()) throw ContractError("SimConfig: eval_xs must be nonempty");
  for (double x : eval_xs)
    if (!(x > x_lo && x <= x_hi)) throw ContractError("SimConfig: eval_xs must lie in (x_lo, x_hi]");
  if (n_points < 3 || n_points % 2 == 0) throw ContractError("SimConfig: n_points must be odd and >= 3");
  if (tau && !(*tau > 0.0)) throw ContractError("SimConfig: tau must be positive");
  if (workers < 0) throw ContractError("SimConfig: workers must be >= 0");
}

SimConfig default_sim_config() {
  SimConfig cfg;
  for (double beta : {0.1, 0.2, 0.5})
    for (double gamma : {0.1, 0.3, 0.5}) cfg.params.push_back(EfldModel{0.5, beta, gamma});
  cfg.ns = {50, 100, 500};
  cfg.methods = all_methods();
  cfg.workers = 0;
  return cfg;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int rep) noexcept {
  return base_seed ^ static_cast<std::uint64_t>(rep);
}

SimResult run_experiment(const SimConfig& cfg) {
  cfg.validate();
  std::vector<Unit> units;
  for (int pid = 0; pid < static_cast<int>(cfg.params.size()); ++pid)
    for (int n : cfg.ns)
      for (int rep = 0; rep < cfg.reps; ++rep) units.push_back(Unit{pid, n, rep});

  std::vector<std::vector<SimRecord>> per_unit(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) per_unit[i] = run_unit(cfg, units[i]);
  };
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const unsigned wanted = cfg.workers == 0 ? hw : static_cast<unsigned>(cfg.workers);
  const auto nthreads = std::min<std::size_t>(wanted, units.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  SimResult result;
  for (auto& recs : per_unit)
    result.records.insert(result.records.end(), recs.begin(), recs.end());
  Aggregates agg = aggregate(result.records);
  result.mse = std::move(agg.mse);
  result.ratios = std::move(agg.ratios);
  return result;
}

Aggregates aggregate(const std::vector<SimRecord>& records) {
  if (records.empty()) throw ContractError("aggregate: no records");
  using Key = std::tuple<int, int, double, int, int>;  // param, n, x, kind, method
  struct Acc {
    double sq = 0.0;
    int count = 0;
    int failed = 0;
  };
  std::map<Key, Acc> cells;
  for (const auto& r : records) {
    Acc& a = cells[Key{r.param_id, r.n, r.x, static_cast<int>(r.kind), static_cast<int>(r.method)}];
    if (r.failed || !std::isfinite(r.error)) {
      ++a.failed;
    } else {
      a.sq += r.error * r.error;
      ++a.count;
    }
  }

  Aggregates out;
  using Group = std::tuple<int, int, double, int>;
  std::map<Group, double> best;
  for (const auto& [k, a] : cells) {
    const auto [pid, n, x, kind, method] = k;
    const double mse = a.count > 0 ? a.sq / a.count : kNaN;
    out.mse.push_back(MseCell{pid, n, static_cast<Method>(method), x, static_cast<CurveKind>(kind), mse,
                              a.count, a.failed});
    if (a.count > 0) {
      auto [it, inserted] = best.try_emplace(Group{pid, n, x, kind}, mse);
      if (!inserted) it->second = std::min(it->second, mse);
    }
  }
  for (const auto& c : out.mse) {
    double ratio = kNaN;
    if (!c.missing()) {
      const double b = best.at(Group{c.param_id, c.n, c.x, static_cast<int>(c.kind)});
      if (b > 0.0) {
        ratio = c.mse / b;
      } else {
        ratio = c.mse == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
      }
    }
    out.ratios.push_back(RatioCell{c.param_id, c.n, c.method, c.x, c.kind, ratio});
  }
  return out;
}

}  // namespace qineq
