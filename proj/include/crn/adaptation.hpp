#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crn/conservation.hpp"
#include "crn/dynamics.hpp"
#include "crn/equilibrium.hpp"
#include "crn/network.hpp"

namespace crn {

struct AdaptationOptions {
  double eps_adapt = 1e-3;   // property 2, relative
  double theta_resp = 1e-2;  // property 3, relative
  double floor = 1e-12;
  double equilibrium_tol = 1e-8;
  SimulationConfig sim = default_sim();

  static SimulationConfig default_sim() {
    SimulationConfig c;
    c.t_max = 1e4;
    return c;
  }
};

struct AdaptationReport {
  bool converged = false;    // property 1
  Vector limit_state;
  bool returns = false;      // property 2
  double deviation = 0.0;    // |N(p) - n0(p)|
  bool responds = false;     // property 3
  double excursion = 0.0;    // sup_t |n_p(t) - n0(p)|
  double baseline = 0.0;     // n0(p)
  bool adapts = false;
};

/// Simulates the response to `f` from the equilibrium n0 and evaluates the
/// three adaptation properties for species p. Throws NotAtEquilibrium when
/// some net flux at n0 is not zero, NoConvergence when no steady state is
/// reached by sim.t_max.
AdaptationReport test_adaptation(const KineticSystem& system, const Vector& n0, std::size_t signal, const Signal& f,
                                 std::size_t product, const AdaptationOptions& options = {});

/// D(zeta) = M diag(zeta) M^T for the ray matrix M.
Matrix D_matrix(const ConservationBasis& basis, const Vector& zeta);

/// <m^(p), D(zeta)^{-1} m^(s)>. Throws SingularD when D is not positive definite.
double obstruction_pairing(const ConservationBasis& basis, const Vector& zeta, std::size_t signal, std::size_t product);

/// 1e-10 ||m^(s)|| ||m^(p)|| / lambda_min(D): the scale below which a pairing counts as zero.
double pairing_tolerance(const ConservationBasis& basis, const Vector& zeta, std::size_t signal, std::size_t product);

/// Classes of i ~ j, where i ~ j when the pairing is nonzero at zeta or at
/// one of `samples` random points within relative radius `radius`, closed
/// transitively.
std::vector<std::vector<std::size_t>> equivalence_classes(const ConservationBasis& basis, const Vector& zeta,
                                                          std::uint64_t seed = 0, std::size_t samples = 32,
                                                          double radius = 1e-3);

struct BreakResult {
  RateFunction rates;
  Vector energy;
  double pairing = 0.0;
  std::size_t samples = 0;
  double rate_change = 0.0;
  bool unchanged = false;
};

/// Draws zeta' near e^{-E} until the pairing is clearly nonzero and rebuilds
/// the reverse rates from E' = -log zeta', keeping forward rates. Throws
/// SearchExhausted after `max_samples`.
BreakResult perturb_to_break_adaptation(const KineticSystem& system, const Vector& energy, std::size_t signal,
                                        std::size_t product, double delta, std::uint64_t seed = 0,
                                        std::size_t max_samples = 1000);

struct AuditReport {
  ClosedReport closed;
  MConnectivity connectivity;
  bool graph_connected = false;
  bool product_unconserved = false;  // m^(p) = 0
  std::optional<double> pairing;
  double pairing_tol = 0.0;
  std::vector<std::vector<std::size_t>> classes;
  bool same_class = false;
  std::optional<bool> responds;
  AdaptationReport simulation;
  std::string conclusion;
  std::optional<bool> prediction_holds;  // set when a structural prediction applies
  Vector initial_state;
};

/// Default signal used by audits: f0 = n0(s), f_inf = 2 f0, r = 0.9.
Signal audit_signal(double f0);

/// Starts from `initial` when given (it must be an equilibrium), otherwise from
/// e^{-E} for detailed-balanced systems or the kinetic limit from all-ones.
AuditReport audit(const KineticSystem& system, std::size_t signal, std::size_t product,
                  std::optional<Signal> f = std::nullopt, const AdaptationOptions& options = {},
                  std::uint64_t seed = 0, const std::optional<Vector>& initial = std::nullopt);

}  // namespace crn
