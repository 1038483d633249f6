#pragma once

// Approximated quantile regression: the check loss with |u| replaced by a
// smooth convex surrogate, minimized by damped Newton steps.

#include <string_view>

#include <Eigen/Dense>

#include "qineq/qr_core.hpp"

namespace qineq {

enum class SmoothKind {
  G,  ///< tau [log(1 + e^{-u/tau}) + log(1 + e^{u/tau})], over-approximates |u|
  H,  ///< u tanh(u/tau), under-approximates |u|
  F,  ///< (G + H) / 2
};

SmoothKind parse_smooth_kind(std::string_view text);

inline constexpr double kTauFloor = 1e-8;

struct SmoothLoss {
  double tau;
  SmoothKind kind = SmoothKind::F;
};

struct LossValue {
  double value;
  double derivative;
};

LossValue loss_eval(const SmoothLoss& loss, double u);

/// Second derivative of the surrogate; used for Newton steps.
double loss_curvature(const SmoothLoss& loss, double u);

struct ObjectiveValue {
  double value;
  Eigen::VectorXd gradient;
};

/// sum_i [f(z_i - x_i^T beta) + (2p - 1)(z_i - x_i^T beta)] and its gradient.
ObjectiveValue aqr_objective(const Dataset& data, double p, double tau, const Eigen::VectorXd& beta,
                             SmoothKind kind = SmoothKind::F);

struct AqrOptions {
  SmoothKind kind = SmoothKind::F;
  int max_iterations = 10000;
  /// Stop once ||grad|| <= gradient_tol * (1 + |value|).
  double gradient_tol = 1e-8;
};

/// Minimizes the AQR objective. Starts from least squares and walks tau down
/// geometrically to the requested value, warm-starting each stage.
FitResult aqr_fit(const Dataset& data, double p, double tau, const AqrOptions& options = {});

SurfaceFit aqr_fit_grid(const Dataset& data, const ProbGrid& grid, double tau,
                        const AqrOptions& options = {});

enum class TauRule {
  IqrRegression,  ///< OQR spread Q(0.75) - Q(0.25) of z at the covariate mean, over sqrt(n)
  IidSd,          ///< sample sd of z over sqrt(n)
};

TauRule parse_tau_rule(std::string_view text);

struct TauChoice {
  double tau;
  TauRule rule_used;
  /// IQR rule produced a nonpositive spread and the sd rule took over.
  bool fell_back = false;
  /// Result was raised to kTauFloor.
  bool floored = false;
};

TauChoice tau_default(const Dataset& data, TauRule rule);

}  // namespace qineq
