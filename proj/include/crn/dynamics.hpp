#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "crn/equilibrium.hpp"
#include "crn/integrator.hpp"
#include "crn/network.hpp"

namespace crn {

/// Net flux of a reversible pair, J_R = K_R n^{I(R)} - K_{-R} n^{F(R)}. For a
/// reaction without reverse this is the one-way propensity.
double reaction_flux(const KineticSystem& system, std::size_t r, const Vector& n);

/// Mass-action propensity K_R prod_{i in I(R)} n_i^{-R(i)}.
double propensity(const KineticSystem& system, std::size_t r, const Vector& n);

/// dn/dt = sum_R K_R R n^{I(R)}.
Vector rhs(const KineticSystem& system, const Vector& n);
/// dn/dt = sum_{R in R_s} R J_R(n); bidirectional systems only.
Vector rhs_flux_form(const KineticSystem& system, const Vector& n);
Matrix rhs_jacobian(const KineticSystem& system, const Vector& n);

/// f(t) = f_inf - (f_inf - f0) e^{-rt}.
struct Signal {
  double f0 = 1.0;
  double f_inf = 1.0;
  double r = 1.0;

  double value(double t) const;
  double derivative(double t) const;
  bool constant() const { return f0 == f_inf; }
};

/// Throws InvalidParams unless f0, f_inf, r > 0. `warning` (if given) is set
/// when the pointwise bound |d/dt log f| < e^{-rt} fails.
Signal make_admissible_signal(double f0, double f_inf, double r, bool* warning = nullptr);

struct SignalCheck {
  bool admissible = false;
  bool linear_at_zero = false;
};

/// Grid check of |d/dt log f(t)| < e^{-rt} on [0, horizon] and of a finite,
/// nonzero slope (f(t) - f(0))/t as t -> 0.
SignalCheck validate_signal(const Signal& signal, double horizon);

using SimulationConfig = IntegratorConfig;

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;       // full state, signal component = f(t)
  std::vector<double> ext_flux;     // J^F(t) = f'(t) - (dn/dt)_signal
  std::vector<double> cumulative_flux;
  std::optional<std::size_t> signal;
  bool steady = false;
  bool used_implicit = false;

  const Vector& final_state() const { return states.back(); }
  std::size_t size() const { return times.size(); }
};

Trajectory simulate_kinetic(const KineticSystem& system, const Vector& n0, const SimulationConfig& config = {});

/// Species `signal` follows the prescribed signal; the cumulative external
/// flux is carried as an extra quadrature component of the integrated state.
Trajectory simulate_signalling(const KineticSystem& system, const Vector& n0, std::size_t signal,
                               const Signal& f, const SimulationConfig& config = {});

/// sum_{j != skip} n_j (log(n_j / n_ref_j) - 1).
double relative_entropy(const Vector& n, const Vector& n_ref, std::optional<std::size_t> skip = std::nullopt);

/// sum_{R in R_s} J_R(n) log prod_j (n_j / n_ref_j)^{R(j)}; nonpositive when
/// n_ref is a detailed-balance equilibrium.
double dissipation(const KineticSystem& system, const Vector& n, const Vector& n_ref);

/// Equilibrium energy whose signal component matches `value`, shifted from e0
/// along the conservation law m: E0 + m (log e^{-E0(s)} - log value) / m(s).
Vector reference_energy(const Vector& e0, const Vector& law, std::size_t signal, double value);

struct LimitPrediction {
  Vector state;
  Vector energy;
  double cumulative_flux = 0.0;
};

/// Long-time limit of a signalling run with f(t) -> f_inf: the equilibrium
/// e^{-E} with E(signal) = -log f_inf and m^T e^{-E} - m^T n0 = m(signal) Jbar
/// for every conservation law.
LimitPrediction predict_limit(const KineticSystem& system, const Vector& n0, std::size_t signal, double f_inf,
                              const NewtonOptions& options = {});

}  // namespace crn
