#include "crn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "crn/error.hpp"

namespace crn {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Fallback {
  double t;
  Vector y;
};

class Stepper {
 public:
  Stepper(const OdeProblem& problem, const IntegratorConfig& config, OdeSolution& out)
      : p_(problem), cfg_(config), out_(out) {}

  bool masked(Eigen::Index i) const {
    return p_.nonnegative.empty() || p_.nonnegative[static_cast<std::size_t>(i)];
  }

  // Returns false if any masked component is below -abs_tol; clamps small negatives.
  bool enforce_sign(Vector& y, bool& clamped) const {
    clamped = false;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (!masked(i) || y(i) >= 0.0) continue;
      if (y(i) < -cfg_.abs_tol) return false;
      y(i) = 0.0;
      clamped = true;
    }
    return true;
  }

  double residual(double t, const Vector& y, const Vector& dy) const {
    return p_.steady ? p_.steady(t, y, dy) : dy.lpNorm<Eigen::Infinity>();
  }

  // Steady-state bookkeeping after an accepted step; true when the window is full.
  bool steady_after(double t, const Vector& y, const Vector& dy) {
    if (!cfg_.detect_steady) return false;
    if (residual(t, y, dy) <= cfg_.steady_tol * (1.0 + y.lpNorm<Eigen::Infinity>())) {
      ++calm_;
    } else {
      calm_ = 0;
    }
    return calm_ >= cfg_.steady_window;
  }

  // Near an attractor the explicit step size is capped by stability and the
  // residual stalls at a tolerance-dependent noise level; implicit Euler takes
  // over once the residual is within 1e3 of the steady threshold or has not
  // halved in kStagnationSteps accepted steps.
  bool stagnated(double t, const Vector& y, const Vector& dy) {
    if (!cfg_.detect_steady || !cfg_.stiff_fallback || cfg_.method != Method::automatic) return false;
    const double r = residual(t, y, dy);
    if (r <= 1e3 * cfg_.steady_tol * (1.0 + y.lpNorm<Eigen::Infinity>())) return true;
    if (r < 0.5 * best_) {
      best_ = r;
      since_best_ = 0;
      return false;
    }
    return ++since_best_ >= kStagnationSteps;
  }

  void record(double t, const Vector& y) {
    out_.t.push_back(t);
    out_.y.push_back(y);
  }

  // Clip a step to the next stop time and t_max.
  double clip(double t, double h, std::size_t& stop_idx) const {
    while (stop_idx < cfg_.stops.size() && cfg_.stops[stop_idx] <= t) ++stop_idx;
    double target = cfg_.t_max;
    if (stop_idx < cfg_.stops.size()) target = std::min(target, cfg_.stops[stop_idx]);
    if (t + h >= target || target - (t + h) < 1e-12 * std::max(1.0, std::abs(target))) h = target - t;
    return h;
  }

  double initial_step(double t, const Vector& y, const Vector& f) const {
    if (cfg_.h_init > 0.0) return std::min(cfg_.h_init, cfg_.h_max);
    double scale = cfg_.abs_tol + cfg_.rel_tol * y.lpNorm<Eigen::Infinity>();
    double d0 = y.lpNorm<Eigen::Infinity>() / scale;
    double d1 = f.lpNorm<Eigen::Infinity>() / scale;
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, cfg_.h_max, cfg_.t_max - t});
    return std::max(h, 1e-12);
  }

  // Dormand-Prince with PI control; returns a restart point for the implicit
  // solver when the explicit method gives up.
  std::optional<Fallback> explicit_rk(double t, Vector y) {
    const Eigen::Index n = y.size();
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n), err(n);
    p_.rhs(t, y, k1);
    double h = initial_step(t, y, k1);
    double err_prev = 1e-4;
    std::size_t stop_idx = 0;
    std::size_t steps = 0;

    while (t < cfg_.t_max) {
      if (steps++ >= cfg_.max_steps) {
        if (cfg_.stiff_fallback) return Fallback{t, y};
        throw NoConvergence("explicit integrator exceeded max_steps");
      }
      h = clip(t, std::min(h, cfg_.h_max), stop_idx);
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        if (cfg_.stiff_fallback) return Fallback{t, y};
        throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t));
      }

      tmp = y + h * a21 * k1;
      p_.rhs(t + c2 * h, tmp, k2);
      tmp = y + h * (a31 * k1 + a32 * k2);
      p_.rhs(t + c3 * h, tmp, k3);
      tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      p_.rhs(t + c4 * h, tmp, k4);
      tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      p_.rhs(t + c5 * h, tmp, k5);
      tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      p_.rhs(t + h, tmp, k6);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      p_.rhs(t + h, ynew, k7);
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double scale = cfg_.abs_tol + cfg_.rel_tol * std::max(y.lpNorm<Eigen::Infinity>(), ynew.lpNorm<Eigen::Infinity>());
      double ratio = err.lpNorm<Eigen::Infinity>() / scale;
      if (!std::isfinite(ratio)) ratio = 1e10;

      bool clamped = false;
      if (ratio > 1.0) {
        ++out_.rejected;
        h *= std::max(0.2, 0.9 * std::pow(ratio, -0.2));
        continue;
      }
      if (!enforce_sign(ynew, clamped)) {
        ++out_.rejected;
        h *= 0.5;
        continue;
      }
      if (clamped) p_.rhs(t + h, ynew, k7);

      t += h;
      y = ynew;
      k1 = k7;
      ++out_.accepted;
      record(t, y);
      if (steady_after(t, y, k1)) {
        out_.steady = true;
        return std::nullopt;
      }
      if (stagnated(t, y, k1)) return Fallback{t, y};

      double r = std::max(ratio, 1e-10);
      double factor = 0.9 * std::pow(r, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      factor = std::clamp(factor, 0.2, 5.0);
      err_prev = std::max(r, 1e-4);
      h *= factor;
    }
    return std::nullopt;
  }

  Matrix jacobian(double t, const Vector& y) const {
    if (p_.jacobian) {
      Matrix j(y.size(), y.size());
      p_.jacobian(t, y, j);
      return j;
    }
    return finite_difference_jacobian(p_.rhs, t, y);
  }

  // Implicit Euler with damped Newton; error estimate (h/2)||f(y1) - f(y0)||.
  void implicit_euler(double t, Vector y) {
    out_.used_implicit = true;
    const Eigen::Index n = y.size();
    Vector f0(n), f1(n), g(n), trial(n), ft(n);
    p_.rhs(t, y, f0);
    double h = initial_step(t, y, f0);
    std::size_t stop_idx = 0;
    std::size_t steps = 0;
    const Matrix eye = Matrix::Identity(n, n);

    while (t < cfg_.t_max) {
      if (steps++ >= cfg_.max_steps) throw NoConvergence("implicit integrator exceeded max_steps");
      h = clip(t, std::min(h, cfg_.h_max), stop_idx);
      if (h < 1e-15 * std::max(1.0, std::abs(t))) {
        throw StepSizeUnderflow("implicit step size underflow at t = " + std::to_string(t));
      }
      const double tn = t + h;

      Vector z = y + h * f0;
      bool clamped_guess = false;
      if (!enforce_sign(z, clamped_guess)) z = y;
      bool converged = false;
      Eigen::PartialPivLU<Matrix> lu(eye - h * jacobian(tn, z));
      for (int it = 0; it < 12; ++it) {
        p_.rhs(tn, z, f1);
        g = z - y - h * f1;
        double gnorm = g.lpNorm<Eigen::Infinity>();
        double newton_tol = 1e-3 * (cfg_.abs_tol + cfg_.rel_tol * z.lpNorm<Eigen::Infinity>());
        if (gnorm <= newton_tol) {
          converged = true;
          break;
        }
        Vector dz = lu.solve(-g);
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 20; ++k, lambda *= 0.5) {
          trial = z + lambda * dz;
          p_.rhs(tn, trial, ft);
          if ((trial - y - h * ft).lpNorm<Eigen::Infinity>() < gnorm) {
            z = trial;
            improved = true;
            break;
          }
        }
        if (!improved) break;
        if (it == 5) lu.compute(eye - h * jacobian(tn, z));
      }
      if (!converged) {
        ++out_.rejected;
        h *= 0.25;
        continue;
      }
      p_.rhs(tn, z, f1);
      double est = 0.5 * h * (f1 - f0).lpNorm<Eigen::Infinity>();
      double scale = cfg_.abs_tol + cfg_.rel_tol * std::max(y.lpNorm<Eigen::Infinity>(), z.lpNorm<Eigen::Infinity>());
      double ratio = est / scale;
      bool clamped = false;
      if (ratio > 1.0 || !std::isfinite(ratio)) {
        ++out_.rejected;
        h *= std::isfinite(ratio) ? std::max(0.2, 0.9 / std::sqrt(ratio)) : 0.25;
        continue;
      }
      if (!enforce_sign(z, clamped)) {
        ++out_.rejected;
        h *= 0.5;
        continue;
      }
      if (clamped) p_.rhs(tn, z, f1);
      t = tn;
      y = z;
      f0 = f1;
      ++out_.accepted;
      record(t, y);
      if (steady_after(t, y, f0)) {
        out_.steady = true;
        return;
      }
      h *= std::clamp(0.9 / std::sqrt(std::max(ratio, 1e-10)), 0.2, 5.0);
    }
    // Growing implicit steps can reach t_max before a full window accumulates.
    if (cfg_.detect_steady && calm_ >= std::min<std::size_t>(cfg_.steady_window, 3)) out_.steady = true;
  }

 private:
  const OdeProblem& p_;
  const IntegratorConfig& cfg_;
  OdeSolution& out_;
  std::size_t calm_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t since_best_ = 0;
  static constexpr std::size_t kStagnationSteps = 200;
};

}  // namespace

OdeSolution integrate(const OdeProblem& problem, double t0, const Vector& y0, const IntegratorConfig& config) {
  if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0)) throw InvalidParams("tolerances must be positive");
  if (!(config.t_max > t0)) throw InvalidParams("t_max must exceed the start time");
  if (!problem.nonnegative.empty() && problem.nonnegative.size() != static_cast<std::size_t>(y0.size())) {
    throw InvalidParams("nonnegativity mask has the wrong length");
  }
  OdeSolution out;
  Stepper stepper(problem, config, out);
  stepper.record(t0, y0);
  if (config.method == Method::implicit_euler) {
    stepper.implicit_euler(t0, y0);
    return out;
  }
  if (auto restart = stepper.explicit_rk(t0, y0)) {
    if (config.method == Method::explicit_rk) throw StepSizeUnderflow("explicit integrator gave up");
    stepper.implicit_euler(restart->t, restart->y);
  }
  return out;
}

Matrix finite_difference_jacobian(const OdeRhs& rhs, double t, const Vector& y, double rel_step) {
  const Eigen::Index n = y.size();
  Matrix jac(n, n);
  Vector yp = y, ym = y, fp(n), fm(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double h = rel_step * std::max(1.0, std::abs(y(j)));
    yp(j) = y(j) + h;
    ym(j) = y(j) - h;
    rhs(t, yp, fp);
    rhs(t, ym, fm);
    jac.col(j) = (fp - fm) / (2.0 * h);
    yp(j) = y(j);
    ym(j) = y(j);
  }
  return jac;
}

}  // namespace crn
