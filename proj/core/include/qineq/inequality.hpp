#pragma once

// qZ / qD inequality curves and their areas (qZI / qDI), for any positive
// quantile function and for plug-in conditional quantiles.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qineq/pwl_surface.hpp"

namespace qineq {

enum class CurveKind { QZ, QD };

std::string_view to_string(CurveKind kind) noexcept;
/// Accepts "qz"/"QZ"/"qd"/"QD".
CurveKind parse_curve_kind(std::string_view text);

inline constexpr int kDefaultCurvePoints = 201;

/// A quantile function evaluable on [0, upper]. `upper` = 1 means the whole
/// unit interval (the value at 1 is never requested); `upper` < 1 marks a
/// missing right tail, as for plug-in estimates.
struct QuantileFn {
  std::function<double(double)> eval;
  double upper = 1.0;

  double operator()(double p) const { return eval(p); }
};

/// Wraps a plug-in conditional quantile; evaluable on [0, p_{m-1}].
QuantileFn as_quantile_fn(const CondQuantile& cq);

/// qZ(p) = 1 - Q(p/2)/Q((1+p)/2), qD(p) = 1 - Q(p/2)/Q(1-p/2).
/// Boundary constants qZ(0)=qZ(1)=qD(0)=1 and qD(1)=0 are returned without
/// touching Q.
double curve_value(CurveKind kind, const QuantileFn& q, double p);

/// Composite Simpson rule over [a, b] for samples at uniform spacing.
double simpson(std::span<const double> values, double a = 0.0, double b = 1.0);

struct CurveSample {
  CurveKind kind;
  std::vector<double> ps;
  std::vector<double> values;
};

/// Samples the curve at n_points uniform orders on [0, 1] (n_points odd).
/// Where Q cannot supply both quantiles (right tail beyond `upper`), the curve
/// itself is interpolated linearly from its last computable value to the
/// boundary anchor.
CurveSample sample_curve(CurveKind kind, const QuantileFn& q, int n_points = kDefaultCurvePoints);

struct IndexValue {
  CurveKind kind;
  double value;
  std::string method;
  /// Covariate vector for conditional indices; empty optional = unconditional.
  std::optional<Eigen::VectorXd> x;
};

/// Simpson integral of the sampled curve. The raw value is returned; it is
/// not clamped into [0, 1].
IndexValue index(CurveKind kind, const QuantileFn& q, int n_points = kDefaultCurvePoints,
                 std::string method = {});

/// Plug-in conditional index at each covariate value (d = 1 surfaces).
std::vector<IndexValue> measure_curve(CurveKind kind, const BetaSurface& surface,
                                      std::span<const double> xs,
                                      int n_points = kDefaultCurvePoints, std::string method = {});

/// General-d variant.
std::vector<IndexValue> measure_curve(CurveKind kind, const BetaSurface& surface,
                                      std::span<const Eigen::VectorXd> xs,
                                      int n_points = kDefaultCurvePoints, std::string method = {});

}  // namespace qineq
