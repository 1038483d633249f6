#include "qineq/smooth_qr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "qineq/errors.hpp"

namespace qineq {

namespace {

std::string lowered(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// sech^2(t) without overflow.
double sech2(double t) {
  const double e = std::exp(-2.0 * std::abs(t));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

Evaluation evaluate(const Dataset& data, double p, const SmoothLoss& loss, const Eigen::VectorXd& beta,
                    bool with_hessian) {
  const Eigen::MatrixXd& X = data.X();
  const Eigen::VectorXd r = data.z() - X * beta;
  const double tilt = 2.0 * p - 1.0;
  Evaluation ev;
  Eigen::VectorXd dr(r.size());
  Eigen::VectorXd curv;
  if (with_hessian) curv.resize(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const LossValue lv = loss_eval(loss, r(i));
    ev.value += lv.value + tilt * r(i);
    dr(i) = lv.derivative + tilt;
    if (with_hessian) curv(i) = loss_curvature(loss, r(i));
  }
  // d r_i / d beta = -x_i
  ev.gradient = -(X.transpose() * dr);
  if (with_hessian) ev.hessian = X.transpose() * curv.asDiagonal() * X;
  return ev;
}

// One tau stage of damped Newton. Returns false if the iteration budget ran out.
bool newton_stage(const Dataset& data, double p, const SmoothLoss& loss, Eigen::VectorXd& beta,
                  double tol, int& budget) {
  Evaluation ev = evaluate(data, p, loss, beta, true);
  while (budget > 0) {
    const double gnorm = ev.gradient.norm();
    if (gnorm <= tol * (1.0 + std::abs(ev.value))) return true;
    --budget;

    Eigen::MatrixXd H = ev.hessian;
    const double ridge = 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += ridge;
    Eigen::VectorXd step = -H.ldlt().solve(ev.gradient);
    if (!step.allFinite() || step.dot(ev.gradient) >= 0.0) step = -ev.gradient;

    double t = 1.0;
    bool accepted = false;
    const double slope = step.dot(ev.gradient);
    for (int k = 0; k < 80; ++k) {
      const Eigen::VectorXd trial = beta + t * step;
      Evaluation cand = evaluate(data, p, loss, trial, true);
      const bool armijo = cand.value <= ev.value + 1e-4 * t * slope;
      // At round-off level the value stops resolving progress; accept
      // gradient reduction instead.
      const bool flat = cand.value <= ev.value + 1e-15 * std::abs(ev.value) &&
                        cand.gradient.norm() < gnorm;
      if (armijo || flat) {
        beta = trial;
        ev = std::move(cand);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Stuck at round-off: the gradient cannot be reduced further.
      return ev.gradient.norm() <= 1e3 * tol * (1.0 + std::abs(ev.value));
    }
  }
  return false;
}

}  // namespace

SmoothKind parse_smooth_kind(std::string_view text) {
  const std::string s = lowered(text);
  if (s == "g") return SmoothKind::G;
  if (s == "h") return SmoothKind::H;
  if (s == "f") return SmoothKind::F;
  throw ParseError("unknown smooth loss kind '" + std::string(text) + "'");
}

LossValue loss_eval(const SmoothLoss& loss, double u) {
  const double tau = loss.tau;
  auto g = [&] {
    const double a = std::abs(u);
    return LossValue{a + 2.0 * tau * std::log1p(std::exp(-a / tau)), std::tanh(u / (2.0 * tau))};
  };
  auto h = [&] {
    const double t = u / tau;
    return LossValue{u * std::tanh(t), std::tanh(t) + t * sech2(t)};
  };
  switch (loss.kind) {
    case SmoothKind::G: return g();
    case SmoothKind::H: return h();
    case SmoothKind::F: {
      const LossValue a = g();
      const LossValue b = h();
      return LossValue{0.5 * (a.value + b.value), 0.5 * (a.derivative + b.derivative)};
    }
  }
  return LossValue{0.0, 0.0};
}

double loss_curvature(const SmoothLoss& loss, double u) {
  const double tau = loss.tau;
  const double gc = sech2(u / (2.0 * tau)) / (2.0 * tau);
  const double t = u / tau;
  const double hc = 2.0 / tau * sech2(t) * (1.0 - t * std::tanh(t));
  switch (loss.kind) {
    case SmoothKind::G: return gc;
    case SmoothKind::H: return hc;
    case SmoothKind::F: return 0.5 * (gc + hc);
  }
  return 0.0;
}

ObjectiveValue aqr_objective(const Dataset& data, double p, double tau, const Eigen::VectorXd& beta,
                             SmoothKind kind) {
  if (!(tau > 0.0)) throw DomainError("aqr_objective: tau must be positive");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("aqr_objective: p outside (0, 1)");
  if (beta.size() != data.d() + 1) throw ContractError("aqr_objective: beta has wrong length");
  Evaluation ev = evaluate(data, p, SmoothLoss{tau, kind}, beta, false);
  return ObjectiveValue{ev.value, std::move(ev.gradient)};
}

FitResult aqr_fit(const Dataset& data, double p, double tau, const AqrOptions& options) {
  if (!(tau > 0.0)) throw DomainError("aqr_fit: tau must be positive");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("aqr_fit: p outside (0, 1)");
  tau = std::max(tau, kTauFloor);

  const Eigen::MatrixXd& X = data.X();
  Eigen::VectorXd beta = X.colPivHouseholderQr().solve(data.z());

  // Continuation: start at the residual scale and shrink tau by 10x per stage.
  const Eigen::VectorXd resid = data.z() - X * beta;
  const double scale = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
  std::vector<double> stages;
  for (double t = scale; t > tau; t *= 0.1) stages.push_back(t);
  stages.push_back(tau);

  int budget = options.max_iterations;
  bool converged = true;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const bool final_stage = s + 1 == stages.size();
    const double tol = final_stage ? options.gradient_tol : 1e-6;
    const bool ok = newton_stage(data, p, SmoothLoss{stages[s], options.kind}, beta, tol, budget);
    if (final_stage) converged = ok;
    if (budget <= 0) {
      converged = false;
      break;
    }
  }
  const ObjectiveValue ov = aqr_objective(data, p, tau, beta, options.kind);
  FitResult out{beta, ov.value, converged ? FitStatus::Optimal : FitStatus::MaxIterations};
  if (!beta.allFinite()) out.status = FitStatus::Degenerate;
  return out;
}

SurfaceFit aqr_fit_grid(const Dataset& data, const ProbGrid& grid, double tau,
                        const AqrOptions& options) {
  Eigen::MatrixXd coeffs(grid.size(), data.d() + 1);
  std::vector<FitStatus> status(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) {
    const FitResult f = aqr_fit(data, grid.knot(j), tau, options);
    if (f.status == FitStatus::Degenerate) {
      coeffs.row(j).setZero();
    } else {
      coeffs.row(j) = f.beta.transpose();
    }
    status[static_cast<std::size_t>(j)] = f.status;
  }
  return SurfaceFit{BetaSurface(grid, std::move(coeffs)), std::move(status)};
}

TauRule parse_tau_rule(std::string_view text) {
  const std::string s = lowered(text);
  if (s == "iqr") return TauRule::IqrRegression;
  if (s == "sd") return TauRule::IidSd;
  throw ParseError("unknown tau rule '" + std::string(text) + "' (expected iqr or sd)");
}

TauChoice tau_default(const Dataset& data, TauRule rule) {
  const double rootn = std::sqrt(static_cast<double>(data.n()));
  TauChoice out{0.0, rule};
  if (rule == TauRule::IqrRegression) {
    if (data.d() < 1) throw ContractError("tau_default: IQR rule needs at least one covariate");
    const Eigen::VectorXd xbar = data.X().colwise().mean().transpose();
    const FitResult lo = oqr_fit(data, 0.25);
    const FitResult hi = oqr_fit(data, 0.75);
    const double iqr = hi.beta.dot(xbar) - lo.beta.dot(xbar);
    if (iqr > 0.0) {
      out.tau = iqr / rootn;
    } else {
      out.fell_back = true;
      rule = TauRule::IidSd;
    }
  }
  if (rule == TauRule::IidSd) {
    out.rule_used = TauRule::IidSd;
    const Eigen::VectorXd& z = data.z();
    const double mean = z.mean();
    const double var = (z.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
    out.tau = std::sqrt(var) / rootn;
  }
  if (!(out.tau >= kTauFloor)) {
    out.tau = kTauFloor;
    out.floored = true;
  }
  return out;
}

}  // namespace qineq
