#pragma once

// Monte Carlo comparison of conditional-index estimators on EFLD samples.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qineq/baselines.hpp"
#include "qineq/fld.hpp"
#include "qineq/inequality.hpp"
#include "qineq/qr_core.hpp"
#include "qineq/smooth_qr.hpp"

namespace qineq {

/// BK is plain OQR with no monotonicity repair, read as a step function.
enum class Method { BK, IOQR, IAQR, CQR, WL1, BRW };

/// Step for BK, Linear for every other method.
Interpolation interpolation_for(Method method) noexcept;

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);
const std::vector<Method>& all_methods();

struct FitOptions {
  /// Fixed AQR smoothing; unset means tau_default(data, tau_rule).
  std::optional<double> tau;
  TauRule tau_rule = TauRule::IqrRegression;
  SmoothKind smooth_kind = SmoothKind::F;
  BaselineConfig baseline;
};

struct MethodFit {
  SurfaceFit fit;
  /// Smoothing actually used (IAQR only).
  std::optional<TauChoice> tau;
};

/// Fits one estimator's coefficient surface on the grid.
MethodFit fit_surface(Method method, const Dataset& data, const ProbGrid& grid,
                      const FitOptions& options = {});

struct SimConfig {
  std::vector<EfldModel> params;
  std::vector<int> ns;
  int reps = 200;
  std::vector<Method> methods;
  int m = 20;
  std::vector<double> eval_xs{1.0, 7.5, 15.0, 22.5, 30.0};
  std::uint64_t base_seed = 20240601;
  int n_points = kDefaultCurvePoints;
  double x_lo = 0.0;
  double x_hi = 30.0;
  TauRule tau_rule = TauRule::IqrRegression;
  std::optional<double> tau;
  /// Non-crossing for WL1/BRW is enforced on [x_lo, x_hi] rather than on the
  /// sample's own covariate range.
  bool enforce_on_support = true;
  /// Worker threads; 0 means one per hardware thread. Results do not depend
  /// on this value.
  int workers = 1;

  void validate() const;
};

/// Desk-scale defaults: alpha = 0.5, beta in {0.1, 0.2, 0.5}, gamma in
/// {0.1, 0.3, 0.5}, n in {50, 100, 500}, 200 replicates, all methods, one worker
/// per hardware thread.
SimConfig default_sim_config();

/// Sample seed for replicate `rep`: base_seed XOR rep.
std::uint64_t replicate_seed(std::uint64_t base_seed, int rep) noexcept;

struct SimRecord {
  int param_id;
  int n;
  Method method;
  double x;
  CurveKind kind;
  int rep;
  double estimate;
  double true_value;
  double error;
  bool failed = false;
  /// check_noncrossing of the fitted surface over all eval_xs.
  bool noncrossing = true;
};

struct MseCell {
  int param_id;
  int n;
  Method method;
  double x;
  CurveKind kind;
  double mse;  ///< NaN when missing
  int count;   ///< replicates used
  int failed;  ///< replicates excluded
  bool missing() const noexcept { return count == 0; }
};

struct RatioCell {
  int param_id;
  int n;
  Method method;
  double x;
  CurveKind kind;
  double ratio;  ///< NaN when the cell is missing
};

struct Aggregates {
  std::vector<MseCell> mse;
  std::vector<RatioCell> ratios;
};

struct SimResult {
  std::vector<SimRecord> records;
  std::vector<MseCell> mse;
  std::vector<RatioCell> ratios;
};

/// Runs every (param, n, rep) unit, fits each method, and scores both index
/// kinds at every eval_x against the closed-form truth.
SimResult run_experiment(const SimConfig& cfg);

/// MSE per (param, n, method, x, kind) over non-failed replicates and the
/// ratio to the best method within each (param, n, x, kind) group.
Aggregates aggregate(const std::vector<SimRecord>& records);

}  // namespace qineq
