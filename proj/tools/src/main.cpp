#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "qineq/csv_io.hpp"
#include "qineq/errors.hpp"

namespace {

using namespace qineq;
namespace fs = std::filesystem;

// Runs `body` with `out` bound to the --out file, or stdout when empty.
template <class F>
int with_output(const std::string& path, F&& body) {
  if (path.empty() || path == "-") return body(std::cout);
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return body(f);
}

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& r : raw) {
    std::size_t start = 0;
    for (;;) {
      const auto pos = r.find(',', start);
      out.push_back(r.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional quantile-based inequality curves and indices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qineq 0.1.0");

  std::string method = "IOQR";
  int m = 20;
  std::optional<double> tau;
  std::string tau_rule = "iqr";
  std::string kind = "both";
  std::vector<std::string> xs_raw;
  int n_points = kDefaultCurvePoints;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out_path;

  auto add_points = [&](CLI::App* sub) {
    sub->add_option("--n-points", n_points, "Curve sample points for Simpson integration (odd)")
        ->check(CLI::Range(3, 1000001));
  };
  auto add_out = [&](CLI::App* sub, const char* help) { sub->add_option("--out,-o", out_path, help); };

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a quantile coefficient surface from a CSV of covariates and y > 0");
  cli::FitArgs fa;
  std::string y_column;
  fit->add_option("input", fa.input, "Input CSV (header row; response in the last column)")->required();
  fit->add_option("--method", method, "BK, IOQR, IAQR, CQR, WL1 or BRW")->capture_default_str();
  fit->add_option("--grid-size,-m", m, "Grid size m; knots at j/m for j = 1..m-1")->capture_default_str()
      ->check(CLI::Range(4, 100000));
  fit->add_option("--tau", tau, "Fixed AQR smoothing parameter (IAQR)")->check(CLI::PositiveNumber);
  fit->add_option("--tau-rule", tau_rule, "Default smoothing rule when --tau is absent")
      ->check(CLI::IsMember({"iqr", "sd"}))->capture_default_str();
  fit->add_option("--y-column", y_column, "Response column name");
  add_out(fit, "Surface CSV; the sidecar is written to <out>.meta.json");
  fit->get_option("--out")->required();

  // indices
  auto* ind = app.add_subcommand("indices", "Conditional qZI/qDI from a fitted surface");
  cli::IndicesArgs ia;
  ind->add_option("surface", ia.surface, "Surface CSV")->required();
  ind->add_option("--x", xs_raw, "Covariate values (comma list; ':' joins entries for d > 1)")->required();
  ind->add_option("--kind", kind, "qz, qd or both")->check(CLI::IsMember({"qz", "qd", "both"}))
      ->capture_default_str();
  add_points(ind);
  add_out(ind, "Output CSV (default stdout)");

  // curves
  auto* cur = app.add_subcommand("curves", "Sampled conditional qZ or qD curve from a fitted surface");
  cli::CurvesArgs ca;
  std::string curve_kind = "qd";
  cur->add_option("surface", ca.surface, "Surface CSV")->required();
  cur->add_option("--x", xs_raw, "Covariate value (':' joins entries for d > 1)")->required();
  cur->add_option("--kind", curve_kind, "qz or qd")->check(CLI::IsMember({"qz", "qd"}))->capture_default_str();
  add_points(cur);
  add_out(cur, "Output CSV (default stdout)");

  // true
  auto* tru = app.add_subcommand("true", "Closed-form indices of the exponentiated flattened logistic model");
  cli::TrueArgs ta;
  std::string curve_out;
  tru->add_option("--alpha", ta.model.alpha, "Location")->capture_default_str();
  tru->add_option("--beta", ta.model.beta, "Scale (> 0)")->capture_default_str();
  tru->add_option("--gamma", ta.model.gamma, "Shape slope, kappa = gamma * x (>= 0)")->capture_default_str();
  tru->add_option("--x", xs_raw, "Covariate values (comma list)")->required();
  tru->add_option("--kind", kind, "qz, qd or both")->check(CLI::IsMember({"qz", "qd", "both"}))
      ->capture_default_str();
  add_points(tru);
  tru->add_option("--curve-out", curve_out, "Also write the curve for the first x and kind");
  add_out(tru, "Output CSV (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimator comparison");
  cli::SimulateArgs sa;
  sim->add_option("config", sa.config, "Experiment config file")->required();
  sim->add_option("--workers", workers, "Worker threads (0 = one per hardware thread)")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", seed, "Override base_seed");
  add_out(sim, "Output directory for errors.csv, mse.csv, mse_ratio.csv");
  sim->get_option("--out")->required();

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Synthetic input data");
  cli::GenDataArgs ga;
  std::string model = "wage";
  gen->add_option("--model", model, "wage (integer experience 0..40) or efld")
      ->check(CLI::IsMember({"wage", "efld"}))->capture_default_str();
  gen->add_option("-n", ga.n, "Rows")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--alpha", ga.efld.alpha, "EFLD location")->capture_default_str();
  gen->add_option("--beta", ga.efld.beta, "EFLD scale")->capture_default_str();
  gen->add_option("--gamma", ga.efld.gamma, "EFLD shape slope")->capture_default_str();
  gen->add_option("--x-lo", ga.x_lo, "EFLD covariate lower bound")->capture_default_str();
  gen->add_option("--x-hi", ga.x_hi, "EFLD covariate upper bound")->capture_default_str();
  gen->add_option("--seed", seed, "RNG seed (default 1)");
  add_out(gen, "Output CSV (default stdout)");

  auto* self = app.add_subcommand("selftest", "Round-trip and schema checks in a scratch directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      fa.method = parse_method(method);
      fa.m = m;
      fa.tau = tau;
      fa.tau_rule = parse_tau_rule(tau_rule);
      if (!y_column.empty()) fa.y_column = y_column;
      fa.out = out_path;
      return cli::cmd_fit(fa, std::cerr);
    }
    if (ind->parsed()) {
      ia.xs = cli::parse_xs(split_list(xs_raw));
      ia.kinds = cli::parse_kinds(kind);
      ia.n_points = n_points;
      return with_output(out_path, [&](std::ostream& o) { return cli::cmd_indices(ia, o, std::cerr); });
    }
    if (cur->parsed()) {
      const auto xs = cli::parse_xs(xs_raw);
      if (xs.size() != 1) throw ContractError("curves takes exactly one --x");
      ca.x = xs.front();
      ca.kind = parse_curve_kind(curve_kind);
      ca.n_points = n_points;
      return with_output(out_path, [&](std::ostream& o) { return cli::cmd_curves(ca, o, std::cerr); });
    }
    if (tru->parsed()) {
      for (const auto& s : split_list(xs_raw)) ta.xs.push_back(io::parse_double(s));
      ta.kinds = cli::parse_kinds(kind);
      ta.n_points = n_points;
      if (!curve_out.empty()) ta.curve_out = curve_out;
      return with_output(out_path, [&](std::ostream& o) { return cli::cmd_true(ta, o, std::cerr); });
    }
    if (sim->parsed()) {
      sa.out_dir = out_path;
      sa.workers = workers;
      sa.seed = seed;
      return cli::cmd_simulate(sa, std::cerr);
    }
    if (gen->parsed()) {
      ga.model = model == "efld" ? cli::DataModel::Efld : cli::DataModel::Wage;
      if (seed) ga.seed = *seed;
      return with_output(out_path, [&](std::ostream& o) { return cli::cmd_gen_data(ga, o, std::cerr); });
    }
    if (self->parsed()) return cli::cmd_selftest(std::cout, std::cerr);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
