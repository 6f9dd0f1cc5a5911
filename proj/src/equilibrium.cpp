#include "crn/equilibrium.hpp"

#include <cmath>

#include "crn/error.hpp"

namespace crn {

namespace {

Matrix stoich_transpose(const ReactionNetwork& network, const std::vector<std::size_t>& columns) {
  Matrix a(static_cast<Eigen::Index>(columns.size()), static_cast<Eigen::Index>(network.num_species()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& R = network.reaction(columns[c]);
    for (std::size_t i = 0; i < R.size(); ++i) a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = R[i];
  }
  return a;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double affinity_of(const RationalVector& cycle, const std::vector<double>& ratios) {
  double a = 0.0;
  for (std::size_t k = 0; k < cycle.size(); ++k) a += cycle[k].get_d() * ratios[k];
  return a;
}

void require_bidirectional(const KineticSystem& system) {
  if (!is_bidirectional(system.network())) throw NotBidirectional("system has reactions without a reverse");
}

}  // namespace

std::vector<double> log_rate_ratios(const KineticSystem& system) {
  require_bidirectional(system);
  const auto& net = system.network();
  std::vector<double> out;
  for (std::size_t r : canonical_half(net)) out.push_back(std::log(system.reverse_rate(r) / system.rate(r)));
  return out;
}

DbCertificate check_detailed_balance(const KineticSystem& system, double tol) {
  const auto& net = system.network();
  const auto ratios = log_rate_ratios(system);
  const auto columns = canonical_half(net);
  const Matrix a = stoich_transpose(net, columns);
  const Vector b = Eigen::Map<const Vector>(ratios.data(), static_cast<Eigen::Index>(ratios.size()));

  Vector e = a.completeOrthogonalDecomposition().solve(b);
  DbCertificate cert;
  cert.residual = (a * e - b).lpNorm<Eigen::Infinity>();
  cert.holds = cert.residual <= tol * (1.0 + inf_norm(ratios));
  if (cert.holds) {
    cert.energy = std::move(e);
    return cert;
  }

  DbViolation worst;
  for (auto& c : cycle_space(net)) {
    double aff = affinity_of(c, ratios);
    if (std::abs(aff) > std::abs(worst.affinity)) worst = {std::move(c), aff};
  }
  if (worst.cycle.empty()) worst.affinity = cert.residual;
  cert.violation = std::move(worst);
  return cert;
}

std::vector<double> cycle_affinities(const KineticSystem& system) {
  const auto ratios = log_rate_ratios(system);
  std::vector<double> out;
  for (const auto& c : cycle_space(system.network())) out.push_back(affinity_of(c, ratios));
  return out;
}

Vector equilibrium_state(const Vector& energy) { return (-energy.array()).exp().matrix(); }

RateFunction make_db_rates(const ReactionNetwork& network, const Vector& energy,
                           const std::vector<double>& forward) {
  return rates_with_delta(network, energy, forward, std::vector<double>(forward.size(), 0.0));
}

std::vector<double> forward_rates(const KineticSystem& system) {
  std::vector<double> out;
  for (std::size_t r : canonical_half(system.network())) out.push_back(system.rate(r));
  return out;
}

ClosedReport is_closed(const KineticSystem& system) {
  ClosedReport out;
  const auto& net = system.network();
  out.detailed_balance = is_bidirectional(net) && check_detailed_balance(system).holds;
  out.conservative = is_conservative(net);
  out.boundary_free = !has_boundary_reactions(net);
  out.closed = out.detailed_balance && out.conservative && out.boundary_free;
  return out;
}

Vector equilibrium_from_totals(const Vector& e0, const Matrix& laws, const Vector& totals,
                               const NewtonOptions& options) {
  if (laws.rows() != totals.size() || laws.cols() != e0.size()) {
    throw InvalidParams("equilibrium_from_totals: dimension mismatch");
  }
  for (Eigen::Index k = 0; k < totals.size(); ++k) {
    if (!(totals(k) > 0.0)) throw InvalidParams("equilibrium_from_totals: totals must be positive");
  }
  const double tol = options.tol * (1.0 + totals.lpNorm<Eigen::Infinity>());
  Vector eta = Vector::Zero(laws.rows());
  auto residual = [&](const Vector& h) {
    Vector z = equilibrium_state(e0 + laws.transpose() * h);
    return Vector(laws * z - totals);
  };

  Vector g = residual(eta);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double norm = g.lpNorm<Eigen::Infinity>();
    if (norm <= tol) return e0 + laws.transpose() * eta;
    Vector z = equilibrium_state(e0 + laws.transpose() * eta);
    Matrix jac = -(laws * z.asDiagonal() * laws.transpose());
    Vector step = jac.ldlt().solve(-g);
    double scale = 1.0;
    bool improved = false;
    for (std::size_t h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      Vector trial = eta + scale * step;
      Vector gt = residual(trial);
      if (gt.allFinite() && gt.lpNorm<Eigen::Infinity>() < norm) {
        eta = std::move(trial);
        g = std::move(gt);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (g.lpNorm<Eigen::Infinity>() <= tol) return e0 + laws.transpose() * eta;
  throw NoConvergence("equilibrium_from_totals: Newton iteration did not converge (incompatible totals?)");
}

Vector equilibrium_from_totals(const Vector& e0, const ConservationBasis& basis, const Vector& totals,
                               const NewtonOptions& options) {
  if (!basis.independent()) throw PreconditionFailed("extreme rays are not linearly independent");
  return equilibrium_from_totals(e0, basis.matrix(), totals, options);
}

std::vector<double> delta_from_rates(const KineticSystem& system, const Vector& reference) {
  const auto& net = system.network();
  const auto ratios = log_rate_ratios(system);
  const auto columns = canonical_half(net);
  std::vector<double> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& R = net.reaction(columns[c]);
    double re = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) re += R[i] * reference(static_cast<Eigen::Index>(i));
    out[c] = ratios[c] - re;
  }
  return out;
}

RateFunction rates_with_delta(const ReactionNetwork& network, const Vector& energy,
                              const std::vector<double>& forward, const std::vector<double>& delta) {
  const auto columns = canonical_half(network);
  if (forward.size() != columns.size() || delta.size() != columns.size()) {
    throw InvalidParams("one forward rate per canonical reaction expected");
  }
  if (static_cast<std::size_t>(energy.size()) != network.num_species()) {
    throw InvalidParams("energy vector length does not match species count");
  }
  RateFunction rates(network.num_reactions(), 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::size_t r = columns[c];
    rates[r] = forward[c];
    if (auto rev = network.reverse_of(r)) {
      const auto& R = network.reaction(r);
      double re = 0.0;
      for (std::size_t i = 0; i < R.size(); ++i) re += R[i] * energy(static_cast<Eigen::Index>(i));
      rates[*rev] = forward[c] * std::exp(re + delta[c]);
    }
  }
  return rates;
}

KineticSystem one_directional_limit(const KineticSystem& system) {
  const auto& net = system.network();
  std::vector<Reaction> reactions;
  RateFunction rates;
  for (std::size_t r : canonical_half(net)) {
    std::size_t keep = r;
    if (auto rev = net.reverse_of(r); rev && system.rate(*rev) > system.rate(r)) keep = *rev;
    reactions.push_back(net.reaction(keep));
    rates.push_back(system.rate(keep));
  }
  return KineticSystem(ReactionNetwork(net.species(), std::move(reactions)), std::move(rates));
}

Matrix conservation_matrix(const ReactionNetwork& network) {
  const auto space = conservation_space(network);
  Matrix m(static_cast<Eigen::Index>(space.size()), static_cast<Eigen::Index>(network.num_species()));
  for (std::size_t k = 0; k < space.size(); ++k)
    for (std::size_t i = 0; i < network.num_species(); ++i)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = space[k][i].get_d();
  return m;
}

}  // namespace crn
