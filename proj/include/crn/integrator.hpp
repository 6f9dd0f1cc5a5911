#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "crn/network.hpp"

namespace crn {

using OdeRhs = std::function<void(double t, const Vector& y, Vector& dy)>;
using OdeJacobian = std::function<void(double t, const Vector& y, Matrix& jac)>;
/// Quantity compared against steady_tol * (1 + ||y||_inf) for steady-state detection.
using SteadyResidual = std::function<double(double t, const Vector& y, const Vector& dy)>;

enum class Method { automatic, explicit_rk, implicit_euler };

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_max = 100.0;
  double h_init = 0.0;  // 0 picks a starting step from the derivative scale
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
  bool detect_steady = true;
  double steady_tol = 1e-9;
  std::size_t steady_window = 10;
  /// Rerun from the failure point with implicit Euler on underflow or max_steps.
  bool stiff_fallback = true;
  Method method = Method::automatic;
  /// Times the integrator must land on exactly (ascending).
  std::vector<double> stops;
};

struct OdeSolution {
  std::vector<double> t;
  std::vector<Vector> y;
  bool steady = false;
  bool used_implicit = false;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct OdeProblem {
  OdeRhs rhs;
  OdeJacobian jacobian;        // optional; finite differences otherwise
  SteadyResidual steady;       // optional; ||dy||_inf otherwise
  std::vector<bool> nonnegative;  // per component; empty means all
};

/// Integrates from (t0, y0) to config.t_max or a detected steady state,
/// recording every accepted step.
OdeSolution integrate(const OdeProblem& problem, double t0, const Vector& y0, const IntegratorConfig& config);

/// Central-difference Jacobian of `rhs` at (t, y).
Matrix finite_difference_jacobian(const OdeRhs& rhs, double t, const Vector& y, double rel_step = 1e-6);

}  // namespace crn
