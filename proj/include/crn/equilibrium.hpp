#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "crn/conservation.hpp"
#include "crn/network.hpp"
#include "crn/rational.hpp"

namespace crn {

inline constexpr double kDetailedBalanceTol = 1e-10;

/// A cycle c over the canonical reactions whose affinity sum_R c(R) log(K(-R)/K(R))
/// does not vanish.
struct DbViolation {
  RationalVector cycle;
  double affinity = 0.0;
};

struct DbCertificate {
  bool holds = false;
  std::optional<Vector> energy;
  std::optional<DbViolation> violation;
  double residual = 0.0;  // infinity norm of S^T E - log-ratio
};

/// log(K(-R)/K(R)) for every R in canonical_half order.
std::vector<double> log_rate_ratios(const KineticSystem& system);

/// Least-squares solve of sum_i R(i) E(i) = log(K(-R)/K(R)); reports the
/// minimum-norm E on success and the worst cycle on failure.
DbCertificate check_detailed_balance(const KineticSystem& system, double tol = kDetailedBalanceTol);

/// Affinity of each cycle-basis vector. Zero everywhere iff detailed balance.
std::vector<double> cycle_affinities(const KineticSystem& system);

/// e^{-E}, componentwise.
Vector equilibrium_state(const Vector& energy);

/// Rates with K(-R) = K(R) exp(sum_i R(i) E(i)). `forward` is indexed like
/// canonical_half; reactions without a reverse keep their forward rate.
RateFunction make_db_rates(const ReactionNetwork& network, const Vector& energy,
                           const std::vector<double>& forward);

/// Forward rates of the canonical reactions, in canonical_half order.
std::vector<double> forward_rates(const KineticSystem& system);

struct ClosedReport {
  bool closed = false;
  bool detailed_balance = false;
  bool conservative = false;
  bool boundary_free = false;
};

ClosedReport is_closed(const KineticSystem& system);

struct NewtonOptions {
  std::size_t max_iterations = 200;
  std::size_t max_halvings = 50;
  double tol = 1e-12;  // relative to 1 + ||target||_inf
};

/// E = E0 + M^T eta with M e^{-E} = totals, by damped Newton on eta. The rows
/// of `laws` must be linearly independent.
Vector equilibrium_from_totals(const Vector& e0, const Matrix& laws, const Vector& totals,
                               const NewtonOptions& options = {});
Vector equilibrium_from_totals(const Vector& e0, const ConservationBasis& basis, const Vector& totals,
                               const NewtonOptions& options = {});

/// Departure from detailed balance relative to a reference energy:
/// delta(R) = log(K(-R)/K(R)) - sum_i R(i) E_ref(i), in canonical_half order.
std::vector<double> delta_from_rates(const KineticSystem& system, const Vector& reference);

/// Inverse of delta_from_rates: K(-R) = K(R) exp(sum_i R(i) E(i) + delta(R)).
RateFunction rates_with_delta(const ReactionNetwork& network, const Vector& energy,
                              const std::vector<double>& forward, const std::vector<double>& delta);

/// Drops the slower member of every reversible pair. Ties keep the canonical one.
KineticSystem one_directional_limit(const KineticSystem& system);

/// Rows of a floating basis of the conservation space (exact kernel, converted).
Matrix conservation_matrix(const ReactionNetwork& network);

}  // namespace crn
