#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crn/dynamics.hpp"
#include "crn/netdsl.hpp"
#include "crn/random.hpp"

namespace crn {

struct ParamSpec {
  std::string name;
  double value;
  std::string description;
  bool positive = true;  // rates must be > 0; energies may be any real
};

/// Right-hand side driven by an external input f(t); for models that are not
/// mass-action networks.
struct CustomRhsModel {
  std::vector<std::string> state_names;
  std::function<void(double t, const Vector& y, double f, Vector& dy)> rhs;
  Vector initial_state;
};

struct BuiltinModel {
  std::string id;
  std::string description;
  std::vector<ParamSpec> params;
  std::optional<NetworkDocument> document;
  std::optional<CustomRhsModel> custom;

  double param(const std::string& name) const;
  bool is_custom() const { return custom.has_value(); }
};

using ParamMap = std::map<std::string, double>;

std::vector<std::string> builtin_ids();
/// Default parameters of a builtin, without building it.
std::vector<ParamSpec> builtin_params(const std::string& id);
/// Throws UnknownModel for an unknown id, InvalidParams for unknown names or
/// out-of-range values.
BuiltinModel builtin(const std::string& id, const ParamMap& params = {});

/// dX/dt = Y - (1 - c) X + f, dY/dt = 1 - c X.
CustomRhsModel bl_linear(double c);

struct BlParams {
  double k1 = 1e5, km1 = 100.0, k2 = 100.0, km2 = 1e5, lambda = 1e3, c0 = 1.0;
};

/// Species X, Y, S, E, yE, xyE, P; the enzyme reactions are reversible, the
/// exchange reactions are one-way. S is the signal and P the product.
NetworkDocument bl_mass_action(const BlParams& params = {}, double x0 = 1.0, double y0 = 1.0);

struct QssReport {
  CustomRhsModel reduced;   // X, Y, P
  double c = 0.0;           // lambda * (k2/km2) * C0
  std::vector<std::string> warnings;
  double p_rel_error = 0.0; // max |P_full - P_red| / max |P_full| on the horizon
  double enzyme_drift = 0.0;
  double yE_rel_error = 0.0;  // [yE] against (k1/km1) E Y once transients decay
  double horizon = 50.0;
};

/// Quasi-steady reduction of the enzyme pair: dX/dt = Y - (1+c) X + f,
/// dY/dt = 1 - Y - c X, dP/dt = c X, compared against the full network with
/// the signal held at `f`.
QssReport qss_reduce_bl(const BlParams& params = {}, double f = 1.0, double horizon = 50.0);

struct CustomTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  bool steady = false;
};

CustomTrajectory simulate_custom(const CustomRhsModel& model, const Vector& y0, const std::function<double(double)>& f,
                                 const SimulationConfig& config = {});

struct CompletionReport {
  std::size_t species = 0;
  std::size_t cycle_dim = 0;
  std::size_t conservation_dim = 0;
  std::vector<RationalVector> conservation_basis;
  bool conservative = false;
  std::vector<std::int64_t> claimed;
  bool length_mismatch = false;
  /// Positions k where inserting some value x before entry k of the claimed
  /// vector gives a conservation law, with that x.
  std::vector<std::pair<std::size_t, Rational>> consistent_insertions;
  std::size_t db_trials = 0;
  std::size_t db_passed = 0;
  std::string summary;
};

CompletionReport verify_completion_claims(std::uint64_t seed = 0, std::size_t trials = 100);

/// E ~ U(-energy_spread, energy_spread), forward rates 10^U(-log_spread, log_spread),
/// reverse rates from detailed balance.
struct RandomDb {
  RateFunction rates;
  Vector energy;
};
RandomDb random_db_rates(const ReactionNetwork& network, Rng& rng, double energy_spread = 1.0,
                         double log_spread = 0.5);

/// Random positive rates without any balance constraint.
RateFunction random_rates(const ReactionNetwork& network, Rng& rng, double log_spread = 0.5);

/// Bidirectional network on n species whose species graph is connected;
/// complexes have at most two molecules.
ReactionNetwork random_connected_network(Rng& rng, std::size_t n);

}  // namespace crn
