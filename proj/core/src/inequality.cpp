#include "qineq/inequality.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "qineq/errors.hpp"

namespace qineq {

namespace {

// Guards against the edge order landing an ulp past `upper`.
double clamp_order(double arg, double upper) {
  if (arg > upper && arg - upper < 1e-12) return upper;
  return arg;
}

double ratio_curve(CurveKind kind, const QuantileFn& q, double p) {
  const double lo_arg = p / 2.0;
  const double hi_arg =
      clamp_order(kind == CurveKind::QZ ? (1.0 + p) / 2.0 : 1.0 - p / 2.0, q.upper);
  const double q_lo = q(lo_arg);
  const double q_hi = q(hi_arg);
  if (!(q_lo > 0.0) || !(q_hi > 0.0))
    throw DomainError("curve_value: quantile function must be positive, got Q(" +
                      std::to_string(lo_arg) + ")=" + std::to_string(q_lo) + ", Q(" +
                      std::to_string(hi_arg) + ")=" + std::to_string(q_hi));
  return 1.0 - q_lo / q_hi;
}

double boundary_value(CurveKind kind, double p) {
  if (p == 0.0) return 1.0;
  return kind == CurveKind::QZ ? 1.0 : 0.0;
}

}  // namespace

std::string_view to_string(CurveKind kind) noexcept { return kind == CurveKind::QZ ? "qz" : "qd"; }

CurveKind parse_curve_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "qz" || lower == "qzi") return CurveKind::QZ;
  if (lower == "qd" || lower == "qdi") return CurveKind::QD;
  throw ParseError("unknown curve kind '" + std::string(text) + "' (expected qz or qd)");
}

QuantileFn as_quantile_fn(const CondQuantile& cq) {
  return QuantileFn{[cq](double p) { return cq(p); }, cq.upper()};
}

double curve_value(CurveKind kind, const QuantileFn& q, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("curve_value: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return boundary_value(kind, p);
  return ratio_curve(kind, q, p);
}

double simpson(std::span<const double> values, double a, double b) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0)
    throw ContractError("simpson: need an odd number (>= 3) of samples, got " + std::to_string(n));
  const double h = (b - a) / static_cast<double>(n - 1);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) (k % 2 == 1 ? odd : even) += values[k];
  return h / 3.0 * (values.front() + 4.0 * odd + 2.0 * even + values.back());
}

CurveSample sample_curve(CurveKind kind, const QuantileFn& q, int n_points) {
  if (n_points < 3 || n_points % 2 == 0)
    throw ContractError("sample_curve: n_points must be odd and >= 3");
  CurveSample out{kind, {}, {}};
  out.ps.resize(static_cast<std::size_t>(n_points));
  out.values.resize(static_cast<std::size_t>(n_points));

  // Computable range of the curve argument given Q on [0, upper].
  const bool full = q.upper >= 1.0;
  double edge = kind == CurveKind::QZ ? 1.0 : 0.0;
  double edge_value = boundary_value(kind, edge);
  if (!full) {
    edge = kind == CurveKind::QZ ? 2.0 * q.upper - 1.0 : 2.0 * (1.0 - q.upper);
    edge_value = ratio_curve(kind, q, edge);
  }

  for (int k = 0; k < n_points; ++k) {
    const double p = static_cast<double>(k) / (n_points - 1);
    const auto idx = static_cast<std::size_t>(k);
    out.ps[idx] = p;
    if (p == 0.0 || p == 1.0) {
      out.values[idx] = boundary_value(kind, p);
    } else if (full || (kind == CurveKind::QZ ? p <= edge : p >= edge)) {
      out.values[idx] = ratio_curve(kind, q, p);
    } else if (kind == CurveKind::QZ) {
      // (edge, qZ(edge)) -> (1, 1)
      out.values[idx] = edge_value + (p - edge) * (1.0 - edge_value) / (1.0 - edge);
    } else {
      // (0, 1) -> (edge, qD(edge))
      out.values[idx] = 1.0 + p * (edge_value - 1.0) / edge;
    }
  }
  return out;
}

IndexValue index(CurveKind kind, const QuantileFn& q, int n_points, std::string method) {
  const CurveSample s = sample_curve(kind, q, n_points);
  return IndexValue{kind, simpson(s.values, 0.0, 1.0), std::move(method), std::nullopt};
}

std::vector<IndexValue> measure_curve(CurveKind kind, const BetaSurface& surface,
                                      std::span<const Eigen::VectorXd> xs, int n_points,
                                      std::string method) {
  std::vector<IndexValue> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    const CondQuantile cq(surface, x);
    IndexValue v = index(kind, as_quantile_fn(cq), n_points, method);
    v.x = x;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<IndexValue> measure_curve(CurveKind kind, const BetaSurface& surface,
                                      std::span<const double> xs, int n_points,
                                      std::string method) {
  std::vector<Eigen::VectorXd> vs;
  vs.reserve(xs.size());
  for (double x : xs) vs.push_back(Eigen::VectorXd::Constant(1, x));
  return measure_curve(kind, surface, std::span<const Eigen::VectorXd>(vs), n_points,
                       std::move(method));
}

}  // namespace qineq
