#pragma once

// Subcommand implementations behind the qineq executable. Each returns the
// process exit code; diagnostics go to `err`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qineq/inequality.hpp"
#include "qineq/simharness.hpp"
#include "qineq/smooth_qr.hpp"

namespace qineq::cli {

std::vector<CurveKind> parse_kinds(const std::string& text);  // "qz", "qd" or "both"

/// One covariate vector per entry; entries of a d > 1 vector are ':'-joined.
std::vector<Eigen::VectorXd> parse_xs(const std::vector<std::string>& items);

struct FitArgs {
  std::filesystem::path input;
  std::filesystem::path out;
  Method method = Method::IOQR;
  int m = 20;
  std::optional<double> tau;
  TauRule tau_rule = TauRule::IqrRegression;
  std::optional<std::string> y_column;
};

/// Writes the surface CSV to `out` and the JSON sidecar to sidecar_path(out).
int cmd_fit(const FitArgs& args, std::ostream& err);

std::filesystem::path sidecar_path(const std::filesystem::path& surface);

struct IndicesArgs {
  std::filesystem::path surface;
  std::vector<Eigen::VectorXd> xs;
  std::vector<CurveKind> kinds{CurveKind::QZ, CurveKind::QD};
  int n_points = kDefaultCurvePoints;
};

int cmd_indices(const IndicesArgs& args, std::ostream& out, std::ostream& err);

struct CurvesArgs {
  std::filesystem::path surface;
  Eigen::VectorXd x;
  CurveKind kind = CurveKind::QD;
  int n_points = kDefaultCurvePoints;
};

int cmd_curves(const CurvesArgs& args, std::ostream& out, std::ostream& err);

struct TrueArgs {
  EfldModel model;
  std::vector<double> xs;
  std::vector<CurveKind> kinds{CurveKind::QZ, CurveKind::QD};
  int n_points = kDefaultCurvePoints;
  /// Full curve dump for the first x and kind.
  std::optional<std::filesystem::path> curve_out;
};

/// Prints `x,kind,value` rows.
int cmd_true(const TrueArgs& args, std::ostream& out, std::ostream& err);

struct SimulateArgs {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& err);

enum class DataModel { Efld, Wage };

struct GenDataArgs {
  DataModel model = DataModel::Wage;
  int n = 407;
  std::uint64_t seed = 1;
  EfldModel efld;
  double x_lo = 0.0;
  double x_hi = 30.0;
};

int cmd_gen_data(const GenDataArgs& args, std::ostream& out, std::ostream& err);

/// End-to-end checks in a scratch directory: fit/indices round trip and
/// schema re-parse of every CSV the tool writes.
int cmd_selftest(std::ostream& out, std::ostream& err);

}  // namespace qineq::cli
