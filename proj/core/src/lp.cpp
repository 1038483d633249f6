#include "qineq/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

#include "qineq/errors.hpp"

namespace qineq::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : unsigned char { Basic, AtLower, AtUpper };

class Simplex {
 public:
  Simplex(const Problem& pb, const Options& opt)
      : pb_(pb), opt_(opt), rows_(pb.A.rows()), structural_(pb.A.cols()),
        total_(structural_ + rows_) {
    if (pb.b.size() != rows_ || pb.c.size() != structural_ || pb.lower.size() != structural_ ||
        pb.upper.size() != structural_)
      throw ContractError("lp::solve: inconsistent problem dimensions");

    lo_.resize(total_);
    up_.resize(total_);
    x_.resize(total_);
    state_.assign(static_cast<std::size_t>(total_), VarState::AtLower);
    art_sign_.assign(static_cast<std::size_t>(rows_), 1.0);

    for (Eigen::Index j = 0; j < structural_; ++j) {
      if (!std::isfinite(pb.lower(j)))
        throw ContractError("lp::solve: lower bounds must be finite");
      if (pb.upper(j) < pb.lower(j)) throw ContractError("lp::solve: upper < lower");
      lo_(j) = pb.lower(j);
      up_(j) = pb.upper(j);
      x_(j) = lo_(j);
    }

    // Artificial basis absorbs the residual of the all-at-lower start.
    Eigen::VectorXd r = pb.b;
    for (Eigen::Index j = 0; j < structural_; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(pb.A, j); it; ++it)
        r(it.row()) -= it.value() * x_(j);
    basis_.resize(static_cast<std::size_t>(rows_));
    binv_ = Eigen::MatrixXd::Zero(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index a = structural_ + i;
      art_sign_[static_cast<std::size_t>(i)] = r(i) >= 0.0 ? 1.0 : -1.0;
      lo_(a) = 0.0;
      up_(a) = kInf;
      x_(a) = std::abs(r(i));
      state_[static_cast<std::size_t>(a)] = VarState::Basic;
      basis_[static_cast<std::size_t>(i)] = a;
      binv_(i, i) = art_sign_[static_cast<std::size_t>(i)];
    }
  }

  Solution run() {
    Solution sol;
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(total_);
    phase1_cost.tail(rows_).setOnes();
    Status st = iterate(phase1_cost);
    sol.iterations = iterations_;
    if (st != Status::Optimal) {
      sol.status = st == Status::Unbounded ? Status::Infeasible : st;
      return finish(sol, phase1_cost);
    }
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) infeasibility += x_(structural_ + i);
    const double bscale = 1.0 + (rows_ > 0 ? pb_.b.cwiseAbs().maxCoeff() : 0.0);
    if (infeasibility > opt_.feasibility_tol * bscale * static_cast<double>(rows_ + 1)) {
      sol.status = Status::Infeasible;
      return finish(sol, phase1_cost);
    }
    // Artificials are pinned at zero for phase 2.
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index a = structural_ + i;
      up_(a) = 0.0;
      if (state_[static_cast<std::size_t>(a)] != VarState::Basic) {
        x_(a) = 0.0;
        state_[static_cast<std::size_t>(a)] = VarState::AtLower;
      }
    }
    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(total_);
    phase2_cost.head(structural_) = pb_.c;
    refactor();
    st = iterate(phase2_cost);
    sol.status = st;
    sol.iterations = iterations_;
    return finish(sol, phase2_cost);
  }

 private:
  Solution& finish(Solution& sol, const Eigen::VectorXd& cost) {
    refactor();
    Eigen::VectorXd cb(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
    sol.duals = binv_.transpose() * cb;
    sol.x = x_.head(structural_);
    sol.objective = pb_.c.dot(sol.x);
    return sol;
  }

  double col_dot(Eigen::Index j, const Eigen::VectorXd& y) const {
    if (j >= structural_) return art_sign_[static_cast<std::size_t>(j - structural_)] * y(j - structural_);
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(pb_.A, j); it; ++it) s += it.value() * y(it.row());
    return s;
  }

  // w = B^{-1} A_j
  Eigen::VectorXd ftran(Eigen::Index j) const {
    if (j >= structural_) {
      const Eigen::Index i = j - structural_;
      return binv_.col(i) * art_sign_[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(rows_);
    for (Eigen::SparseMatrix<double>::InnerIterator it(pb_.A, j); it; ++it)
      w.noalias() += binv_.col(it.row()) * it.value();
    return w;
  }

  void refactor() {
    if (rows_ == 0) return;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j >= structural_) {
        B(j - structural_, i) = art_sign_[static_cast<std::size_t>(j - structural_)];
      } else {
        for (Eigen::SparseMatrix<double>::InnerIterator it(pb_.A, j); it; ++it)
          B(it.row(), i) = it.value();
      }
    }
    binv_ = B.partialPivLu().inverse();
    Eigen::VectorXd rhs = pb_.b;
    for (Eigen::Index j = 0; j < total_; ++j) {
      if (state_[static_cast<std::size_t>(j)] == VarState::Basic || x_(j) == 0.0) continue;
      if (j >= structural_) {
        rhs(j - structural_) -= art_sign_[static_cast<std::size_t>(j - structural_)] * x_(j);
      } else {
        for (Eigen::SparseMatrix<double>::InnerIterator it(pb_.A, j); it; ++it)
          rhs(it.row()) -= it.value() * x_(j);
      }
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (Eigen::Index i = 0; i < rows_; ++i) x_(basis_[static_cast<std::size_t>(i)]) = xb(i);
    since_refactor_ = 0;
  }

  Status iterate(const Eigen::VectorXd& cost) {
    Eigen::VectorXd cb(rows_);
    int degenerate_run = 0;
    bool bland = false;
    const double cscale = 1.0 + cost.cwiseAbs().maxCoeff();
    const double dtol = opt_.optimality_tol * cscale;

    for (;;) {
      if (iterations_ >= opt_.max_iterations) return Status::IterationLimit;
      if (since_refactor_ >= opt_.refactor_every) refactor();

      for (Eigen::Index i = 0; i < rows_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd y = binv_.transpose() * cb;

      // Pricing: Dantzig, or Bland's smallest index while stalling.
      Eigen::Index entering = -1;
      double best = 0.0;
      for (Eigen::Index j = 0; j < total_; ++j) {
        const VarState s = state_[static_cast<std::size_t>(j)];
        if (s == VarState::Basic || lo_(j) == up_(j)) continue;
        const double d = cost(j) - col_dot(j, y);
        const double score = s == VarState::AtLower ? -d : d;
        if (score > dtol && score > best) {
          best = score;
          entering = j;
          if (bland) break;
        }
      }
      if (entering < 0) return Status::Optimal;

      const Eigen::VectorXd w = ftran(entering);
      const double dir = state_[static_cast<std::size_t>(entering)] == VarState::AtLower ? 1.0 : -1.0;
      const double flip = up_(entering) - lo_(entering);

      // Harris two-pass ratio test.
      double relaxed = kInf;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double alpha = dir * w(i);
        const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
        if (alpha > opt_.pivot_tol) {
          relaxed = std::min(relaxed, (x_(b) - lo_(b) + opt_.feasibility_tol) / alpha);
        } else if (alpha < -opt_.pivot_tol && std::isfinite(up_(b))) {
          relaxed = std::min(relaxed, (up_(b) - x_(b) + opt_.feasibility_tol) / -alpha);
        }
      }
      Eigen::Index leave = -1;
      double theta = kInf;
      double leave_alpha = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double alpha = dir * w(i);
        const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
        double t;
        if (alpha > opt_.pivot_tol) {
          t = std::max(0.0, x_(b) - lo_(b)) / alpha;
        } else if (alpha < -opt_.pivot_tol && std::isfinite(up_(b))) {
          t = std::max(0.0, up_(b) - x_(b)) / -alpha;
        } else {
          continue;
        }
        if (bland) {
          if (t < theta - 1e-14 ||
              (t <= theta + 1e-14 && leave >= 0 && b < basis_[static_cast<std::size_t>(leave)])) {
            theta = t;
            leave = i;
            leave_alpha = alpha;
          }
        } else if (t <= relaxed && std::abs(alpha) > std::abs(leave_alpha)) {
          theta = t;
          leave = i;
          leave_alpha = alpha;
        }
      }

      const bool do_flip = std::isfinite(flip) && (leave < 0 || flip <= theta);
      if (do_flip) theta = flip;
      if (!std::isfinite(theta)) return Status::Unbounded;

      ++iterations_;
      ++since_refactor_;
      if (theta <= 1e-13) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      for (Eigen::Index i = 0; i < rows_; ++i)
        x_(basis_[static_cast<std::size_t>(i)]) -= dir * theta * w(i);

      if (do_flip) {
        auto& s = state_[static_cast<std::size_t>(entering)];
        if (s == VarState::AtLower) {
          s = VarState::AtUpper;
          x_(entering) = up_(entering);
        } else {
          s = VarState::AtLower;
          x_(entering) = lo_(entering);
        }
        continue;
      }

      x_(entering) += dir * theta;
      const Eigen::Index out = basis_[static_cast<std::size_t>(leave)];
      if (leave_alpha > 0.0) {
        x_(out) = lo_(out);
        state_[static_cast<std::size_t>(out)] = VarState::AtLower;
      } else {
        x_(out) = up_(out);
        state_[static_cast<std::size_t>(out)] = VarState::AtUpper;
      }
      state_[static_cast<std::size_t>(entering)] = VarState::Basic;
      basis_[static_cast<std::size_t>(leave)] = entering;

      const double pivot = w(leave);
      binv_.row(leave) /= pivot;
      for (Eigen::Index k = 0; k < rows_; ++k) {
        if (k == leave || w(k) == 0.0) continue;
        binv_.row(k) -= w(k) * binv_.row(leave);
      }
    }
  }

  const Problem& pb_;
  const Options& opt_;
  Eigen::Index rows_;
  Eigen::Index structural_;
  Eigen::Index total_;
  Eigen::VectorXd lo_, up_, x_;
  std::vector<VarState> state_;
  std::vector<double> art_sign_;
  std::vector<Eigen::Index> basis_;
  Eigen::MatrixXd binv_;
  long iterations_ = 0;
  int since_refactor_ = 0;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  Simplex s(problem, options);
  return s.run();
}

}  // namespace qineq::lp
