#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qineq/baselines.hpp"
#include "qineq/csv_io.hpp"
#include "qineq/errors.hpp"
#include "qineq/fld.hpp"

namespace qineq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string x_label(const Eigen::VectorXd& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? ":" : "") + io::format_double(x(i));
  return s;
}

struct SurfaceMeta {
  std::string method = "unknown";
  std::optional<Eigen::VectorXd> lo, hi;

  Interpolation interpolation() const {
    return method == "BK" ? interpolation_for(Method::BK) : Interpolation::Linear;
  }
};

SurfaceMeta load_meta(const fs::path& surface, std::ostream& err) {
  SurfaceMeta meta;
  const fs::path side = sidecar_path(surface);
  if (!fs::exists(side)) {
    err << "warning: no sidecar " << side.string() << "; covariate range unknown\n";
    return meta;
  }
  std::ifstream in = open_in(side);
  const json j = json::parse(in);
  meta.method = j.at("method").get<std::string>();
  const auto lo = j.at("covariate_min").get<std::vector<double>>();
  const auto hi = j.at("covariate_max").get<std::vector<double>>();
  meta.lo = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  meta.hi = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  return meta;
}

bool outside(const SurfaceMeta& meta, const Eigen::VectorXd& x) {
  if (!meta.lo) return false;
  if (meta.lo->size() != x.size()) return true;
  return (x.array() < meta.lo->array()).any() || (x.array() > meta.hi->array()).any();
}

BetaSurface load_surface(const fs::path& path) {
  std::ifstream in = open_in(path);
  return io::read_surface(in);
}

void check_dim(const BetaSurface& s, const Eigen::VectorXd& x) {
  if (x.size() != s.dim())
    throw ContractError("x has " + std::to_string(x.size()) + " entries but the surface has " +
                        std::to_string(s.dim()) + " covariates");
}

double logit(double u) { return std::log(u / (1.0 - u)); }

}  // namespace

std::vector<CurveKind> parse_kinds(const std::string& text) {
  if (text == "both") return {CurveKind::QZ, CurveKind::QD};
  return {parse_curve_kind(text)};
}

std::vector<Eigen::VectorXd> parse_xs(const std::vector<std::string>& items) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& item : items) {
    std::vector<double> vals;
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ':')) vals.push_back(io::parse_double(part));
    if (vals.empty()) throw ParseError("empty --x entry");
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  return out;
}

fs::path sidecar_path(const fs::path& surface) { return fs::path(surface.string() + ".meta.json"); }

int cmd_fit(const FitArgs& args, std::ostream& err) {
  io::InputTable table = [&] {
    std::ifstream in = open_in(args.input);
    return io::read_input_table(in, args.y_column);
  }();
  const Dataset data = Dataset::from_responses(table.covariates, table.y);
  const ProbGrid grid(args.m);
  FitOptions opts;
  opts.tau = args.tau;
  opts.tau_rule = args.tau_rule;
  const MethodFit mf = fit_surface(args.method, data, grid, opts);

  {
    std::ofstream out = open_out(args.out);
    io::write_surface(out, mf.fit.surface);
  }

  const Eigen::MatrixXd& cov = table.covariates;
  std::vector<double> lo, hi;
  for (Eigen::Index i = 0; i < cov.cols(); ++i) {
    lo.push_back(cov.col(i).minCoeff());
    hi.push_back(cov.col(i).maxCoeff());
  }
  const std::vector<Eigen::VectorXd> corners = data_corners(data);
  const NoncrossingReport nc = check_noncrossing(mf.fit.surface, corners);

  json meta;
  meta["method"] = std::string(to_string(args.method));
  meta["m"] = args.m;
  meta["n"] = data.n();
  meta["d"] = data.d();
  meta["covariates"] = table.covariate_names;
  meta["covariate_min"] = lo;
  meta["covariate_max"] = hi;
  if (mf.tau) {
    meta["tau"] = mf.tau->tau;
    meta["tau_rule"] = mf.tau->rule_used == TauRule::IidSd ? "sd" : "iqr";
    meta["tau_fell_back"] = mf.tau->fell_back;
    meta["tau_floored"] = mf.tau->floored;
  } else {
    meta["tau"] = nullptr;
  }
  json status = json::array();
  for (FitStatus s : mf.fit.status) status.push_back(std::string(to_string(s)));
  meta["knot_status"] = status;
  json viol = json::array();
  for (const auto& [xi, row] : nc.violations)
    viol.push_back({{"x", x_label(corners[xi])}, {"knot", grid.knot(row)}});
  meta["noncrossing"] = {{"ok", nc.ok}, {"checked_at", "covariate range corners"}, {"violations", viol}};
  {
    std::ofstream out = open_out(sidecar_path(args.out));
    out << meta.dump(2) << '\n';
  }

  if (!mf.fit.all_optimal()) err << "warning: some knots did not reach an optimal solution; see sidecar\n";
  if (!nc.ok) err << "warning: fitted quantiles cross within the covariate range (" << nc.violations.size()
                  << " violations)\n";
  return 0;
}

int cmd_indices(const IndicesArgs& args, std::ostream& out, std::ostream& err) {
  const BetaSurface surface = load_surface(args.surface);
  const SurfaceMeta meta = load_meta(args.surface, err);
  std::vector<io::IndexRow> rows;
  for (const auto& x : args.xs) {
    check_dim(surface, x);
    const bool extra = outside(meta, x);
    if (extra) err << "warning: x=" << x_label(x) << " is outside the fitted covariate range\n";
    const CondQuantile cq(surface, x, meta.interpolation());
    for (CurveKind kind : args.kinds) {
      const IndexValue v = index(kind, as_quantile_fn(cq), args.n_points, meta.method);
      rows.push_back(io::IndexRow{x, kind, meta.method, v.value, extra});
    }
  }
  io::write_indices(out, rows);
  return 0;
}

int cmd_curves(const CurvesArgs& args, std::ostream& out, std::ostream& err) {
  const BetaSurface surface = load_surface(args.surface);
  const SurfaceMeta meta = load_meta(args.surface, err);
  check_dim(surface, args.x);
  if (outside(meta, args.x)) err << "warning: x=" << x_label(args.x) << " is outside the fitted covariate range\n";
  const CondQuantile cq(surface, args.x, meta.interpolation());
  io::write_curve(out, sample_curve(args.kind, as_quantile_fn(cq), args.n_points));
  return 0;
}

int cmd_true(const TrueArgs& args, std::ostream& out, std::ostream&) {
  if (!(args.model.beta > 0.0)) throw DomainError("beta must be positive");
  if (!(args.model.gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  out << "x,kind,value\n";
  for (double x : args.xs)
    for (CurveKind kind : args.kinds)
      out << io::format_double(x) << ',' << to_string(kind) << ','
          << io::format_double(efld_true_index(kind, args.model.beta, args.model.gamma * x, args.n_points)) << '\n';
  if (args.curve_out && !args.xs.empty() && !args.kinds.empty()) {
    const double gx = args.model.gamma * args.xs.front();
    const CurveKind kind = args.kinds.front();
    CurveSample cs{kind, {}, {}};
    for (int k = 0; k < args.n_points; ++k) {
      const double p = static_cast<double>(k) / (args.n_points - 1);
      cs.ps.push_back(p);
      double v;
      if (k == 0) {
        v = 1.0;
      } else if (k == args.n_points - 1) {
        v = kind == CurveKind::QZ ? 1.0 : 0.0;
      } else {
        v = efld_true_curve(kind, args.model.beta, gx, p);
      }
      cs.values.push_back(v);
    }
    std::ofstream f = open_out(*args.curve_out);
    io::write_curve(f, cs);
  }
  return 0;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& err) {
  SimConfig cfg = [&] {
    std::ifstream in = open_in(args.config);
    return io::parse_sim_config(in);
  }();
  if (args.workers) cfg.workers = *args.workers;
  if (args.seed) cfg.base_seed = *args.seed;
  cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const SimResult res = run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(args.out_dir);
  {
    std::ofstream f = open_out(args.out_dir / "errors.csv");
    io::write_errors(f, res.records);
  }
  {
    std::ofstream f = open_out(args.out_dir / "mse.csv");
    io::write_mse(f, res.mse, cfg.params);
  }
  {
    std::ofstream f = open_out(args.out_dir / "mse_ratio.csv");
    io::write_ratios(f, res.ratios);
  }
  std::size_t failed = 0;
  for (const auto& r : res.records) failed += r.failed ? 1 : 0;
  err << res.records.size() << " records (" << failed << " failed) in " << secs << " s\n";
  return 0;
}

int cmd_gen_data(const GenDataArgs& args, std::ostream& out, std::ostream&) {
  if (args.n < 1) throw ContractError("n must be positive");
  if (args.model == DataModel::Efld) {
    io::write_sample(out, efld_sample(args.efld, args.x_lo, args.x_hi, args.n, args.seed));
    return 0;
  }
  // Integer experience 0..40, log wage linear in experience with a spread
  // that widens over the career.
  std::mt19937_64 rng = make_rng(args.seed);
  out << "exper,wage\n";
  for (int i = 0; i < args.n; ++i) {
    const int exper = std::min(40, static_cast<int>(open_uniform(rng) * 41.0));
    const double lw = 2.4 + 0.022 * exper + (0.18 + 0.006 * exper) * logit(open_uniform(rng));
    out << exper << ',' << io::format_double(std::exp(lw)) << '\n';
  }
  return 0;
}

int cmd_selftest(std::ostream& out, std::ostream& err) {
  const fs::path dir = fs::temp_directory_path() /
                       ("qineq-selftest-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(dir);
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail = {}) {
    out << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : " (" + detail + ")") << '\n';
    failures += ok ? 0 : 1;
  };
  std::ostringstream sink;

  try {
    {
      std::ofstream f = open_out(dir / "wage.csv");
      cmd_gen_data(GenDataArgs{DataModel::Wage, 300, 11, {}, 0.0, 30.0}, f, sink);
    }
    FitArgs fa;
    fa.input = dir / "wage.csv";
    fa.out = dir / "surface.csv";
    fa.method = Method::IOQR;
    fa.m = 10;
    cmd_fit(fa, sink);

    std::ifstream in = open_in(dir / "wage.csv");
    const io::InputTable t = io::read_input_table(in);
    const Dataset data = Dataset::from_responses(t.covariates, t.y);
    const BetaSurface direct = fit_surface(Method::IOQR, data, ProbGrid(10)).fit.surface;
    const BetaSurface parsed = load_surface(fa.out);
    report("surface round trip", parsed.coeffs() == direct.coeffs());

    IndicesArgs ia;
    ia.surface = fa.out;
    ia.xs = parse_xs({"0", "20", "40", "45"});
    std::stringstream idx;
    cmd_indices(ia, idx, sink);
    const io::CsvTable it = io::read_csv(idx);
    io::require_header(it, {"x", "kind", "method", "value", "extrapolated"});
    bool same = it.rows.size() == 8;
    bool flags = same;
    for (std::size_t r = 0; same && r < it.rows.size(); ++r) {
      const double x = io::parse_double(it.rows[r][0]);
      const CurveKind kind = parse_curve_kind(it.rows[r][1]);
      const double lib = index(kind, as_quantile_fn(CondQuantile(direct, Eigen::VectorXd::Constant(1, x)))).value;
      same = same && io::parse_double(it.rows[r][3]) == lib;
      flags = flags && (it.rows[r][4] == "true") == (x > 40.0);
    }
    report("indices match library values", same);
    report("extrapolation flagged", flags);

    CurvesArgs ca;
    ca.surface = fa.out;
    ca.x = Eigen::VectorXd::Constant(1, 10.0);
    ca.kind = CurveKind::QD;
    std::stringstream cur;
    cmd_curves(ca, cur, sink);
    const io::CsvTable ct = io::read_csv(cur);
    io::require_header(ct, {"p", "value"});
    report("curve anchors", ct.rows.size() == kDefaultCurvePoints && ct.rows.front()[1] == "1" &&
                                ct.rows.back()[1] == "0");

    {
      std::ofstream f = open_out(dir / "sim.cfg");
      f << "params = 0.5:0.2:0.1\nns = 40\nreps = 2\nmethods = IOQR\n";
    }
    cmd_simulate(SimulateArgs{dir / "sim.cfg", dir / "sim", std::nullopt, std::nullopt}, sink);
    auto table = [&](const char* name) {
      std::ifstream f = open_in(dir / "sim" / name);
      return io::read_csv(f);
    };
    const io::CsvTable et = table("errors.csv");
    io::require_header(et, {"param_id", "n", "method", "x", "kind", "rep", "error"});
    io::require_header(table("mse.csv"),
                       {"param_id", "alpha", "beta", "gamma", "n", "method", "x", "kind", "mse", "count", "failed"});
    io::require_header(table("mse_ratio.csv"), {"param_id", "n", "method", "x", "kind", "ratio"});
    report("simulate outputs parse", et.rows.size() == SimConfig{}.eval_xs.size() * 2 * 2);
  } catch (const std::exception& e) {
    report("selftest", false, e.what());
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (failures) err << failures << " selftest check(s) failed\n";
  return failures ? 1 : 0;
}

}  // namespace qineq::cli
