#include "crn/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crn/error.hpp"
#include "crn/random.hpp"
#include "crn/response.hpp"

namespace crn {

namespace {

Vector species_column(const ConservationBasis& basis, std::size_t i) {
  const auto v = basis.per_species(i);
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = static_cast<double>(v[k]);
  return out;
}

Eigen::LLT<Matrix> factor(const ConservationBasis& basis, const Vector& zeta) {
  if (basis.empty()) throw SingularD("no conservation laws: D is empty");
  Eigen::LLT<Matrix> llt(D_matrix(basis, zeta));
  if (llt.info() != Eigen::Success) throw SingularD("D(zeta) is not positive definite");
  return llt;
}

double pairing_with(const Eigen::LLT<Matrix>& llt, const Vector& a, const Vector& b) { return a.dot(llt.solve(b)); }

double lambda_min(const Matrix& d) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(d, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace

AdaptationReport test_adaptation(const KineticSystem& system, const Vector& n0, std::size_t signal, const Signal& f,
                                 std::size_t product, const AdaptationOptions& options) {
  const auto& net = system.network();
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    double fwd = propensity(system, r, n0);
    double j = reaction_flux(system, r, n0);
    double back = net.reverse_of(r) ? propensity(system, *net.reverse_of(r), n0) : 0.0;
    if (std::abs(j) > options.equilibrium_tol * std::max(fwd + back, options.floor)) {
      throw NotAtEquilibrium("initial state is not an equilibrium: reaction " + net.describe(r) +
                             " carries net flux " + std::to_string(j));
    }
  }

  Trajectory tr = simulate_signalling(system, n0, signal, f, options.sim);
  if (!tr.steady) throw NoConvergence("no steady state before t_max = " + std::to_string(options.sim.t_max));

  const auto p = static_cast<Eigen::Index>(product);
  AdaptationReport rep;
  rep.converged = true;
  rep.limit_state = tr.final_state();
  rep.baseline = n0(p);
  rep.deviation = std::abs(rep.limit_state(p) - rep.baseline);
  for (const auto& n : tr.states) rep.excursion = std::max(rep.excursion, std::abs(n(p) - rep.baseline));
  const double ref = std::max(rep.baseline, options.floor);
  rep.returns = rep.deviation <= options.eps_adapt * ref;
  rep.responds = rep.excursion >= options.theta_resp * ref;
  rep.adapts = rep.converged && rep.returns && rep.responds;
  return rep;
}

Matrix D_matrix(const ConservationBasis& basis, const Vector& zeta) {
  const Matrix M = basis.matrix();
  if (zeta.size() != M.cols()) throw InvalidParams("zeta length does not match species count");
  return M * zeta.asDiagonal() * M.transpose();
}

double obstruction_pairing(const ConservationBasis& basis, const Vector& zeta, std::size_t signal,
                           std::size_t product) {
  auto llt = factor(basis, zeta);
  return pairing_with(llt, species_column(basis, product), species_column(basis, signal));
}

double pairing_tolerance(const ConservationBasis& basis, const Vector& zeta, std::size_t signal, std::size_t product) {
  const double lmin = lambda_min(D_matrix(basis, zeta));
  if (!(lmin > 0.0)) throw SingularD("D(zeta) is not positive definite");
  return 1e-10 * species_column(basis, signal).norm() * species_column(basis, product).norm() / lmin;
}

std::vector<std::vector<std::size_t>> equivalence_classes(const ConservationBasis& basis, const Vector& zeta,
                                                          std::uint64_t seed, std::size_t samples, double radius) {
  const std::size_t n = basis.num_species();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Vector> cols;
  for (std::size_t i = 0; i < n; ++i) cols.push_back(species_column(basis, i));

  Rng rng(seed);
  for (std::size_t k = 0; k <= samples; ++k) {
    Vector z = zeta;
    if (k > 0) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) *= 1.0 + uniform(rng, -radius, radius);
    }
    auto llt = factor(basis, z);
    const double lmin = lambda_min(D_matrix(basis, z));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (find(i) == find(j)) continue;
        const double tol = 1e-10 * cols[i].norm() * cols[j].norm() / lmin;
        if (std::abs(pairing_with(llt, cols[i], cols[j])) > tol) parent[find(i)] = find(j);
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

BreakResult perturb_to_break_adaptation(const KineticSystem& system, const Vector& energy, std::size_t signal,
                                        std::size_t product, double delta, std::uint64_t seed,
                                        std::size_t max_samples) {
  if (!(delta > 0.0) || delta >= 1.0) throw InvalidParams("delta must lie in (0, 1)");
  const auto& net = system.network();
  const auto basis = extreme_rays(net);
  const Vector zeta = equilibrium_state(energy);

  BreakResult out;
  out.pairing = obstruction_pairing(basis, zeta, signal, product);
  if (std::abs(out.pairing) > pairing_tolerance(basis, zeta, signal, product)) {
    out.rates = system.rates();
    out.energy = energy;
    out.unchanged = true;
    return out;
  }

  const auto forward = forward_rates(system);
  Rng rng(seed);
  for (std::size_t k = 1; k <= max_samples; ++k) {
    Vector z = zeta;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) *= 1.0 + uniform(rng, -delta, delta);
    const double pairing = obstruction_pairing(basis, z, signal, product);
    if (std::abs(pairing) <= pairing_tolerance(basis, z, signal, product)) continue;
    out.energy = -z.array().log().matrix();
    out.rates = make_db_rates(net, out.energy, forward);
    out.pairing = pairing;
    out.samples = k;
    for (std::size_t r = 0; r < out.rates.size(); ++r) {
      out.rate_change = std::max(out.rate_change, std::abs(out.rates[r] - system.rate(r)));
    }
    return out;
  }
  throw SearchExhausted("pairing stayed zero on every sample; the conservation laws may factorize");
}

Signal audit_signal(double f0) { return make_admissible_signal(f0, 2.0 * f0, 0.9); }

AuditReport audit(const KineticSystem& system, std::size_t signal, std::size_t product, std::optional<Signal> f,
                  const AdaptationOptions& options, std::uint64_t seed, const std::optional<Vector>& initial) {
  const auto& net = system.network();
  AuditReport rep;
  rep.closed = is_closed(system);
  const auto basis = extreme_rays(net);
  rep.connectivity = m_connectivity(basis);
  rep.graph_connected = species_graph(net).components().size() == 1;
  rep.product_unconserved = !basis.touches(product);

  Vector n0;
  std::optional<DbCertificate> cert;
  if (is_bidirectional(net)) cert = check_detailed_balance(system);
  if (initial) {
    if (initial->size() != static_cast<Eigen::Index>(net.num_species()) || !(initial->array() > 0.0).all()) {
      throw InvalidParams("audit initial state must be positive with one entry per species");
    }
    n0 = *initial;
  } else if (cert && cert->holds) {
    n0 = equilibrium_state(*cert->energy);
  } else {
    SimulationConfig cfg = options.sim;
    cfg.t_max = std::max(cfg.t_max, 1e4);
    Trajectory tr = simulate_kinetic(system, Vector::Ones(static_cast<Eigen::Index>(net.num_species())), cfg);
    if (!tr.steady) throw NoConvergence("could not find a steady state to start from");
    n0 = tr.final_state();
  }
  rep.initial_state = n0;

  if (!basis.empty() && basis.independent()) {
    rep.pairing = obstruction_pairing(basis, n0, signal, product);
    rep.pairing_tol = pairing_tolerance(basis, n0, signal, product);
    rep.classes = equivalence_classes(basis, n0, seed);
    for (const auto& c : rep.classes) {
      bool s_in = std::binary_search(c.begin(), c.end(), signal);
      bool p_in = std::binary_search(c.begin(), c.end(), product);
      if (s_in && p_in) rep.same_class = true;
    }
  }

  if (cert && cert->holds) {
    try {
      auto layers = layer_hierarchy(net, signal, product);
      const Vector energy = -n0.array().log().matrix();
      rep.responds = response_coefficients(linearized_matrix(system, energy, signal), layers).responds;
    } catch (const NotConnected&) {
      rep.responds = false;
    }
  }

  Signal sig = f ? *f : audit_signal(n0(static_cast<Eigen::Index>(signal)));
  sig.f0 = n0(static_cast<Eigen::Index>(signal));
  rep.simulation = test_adaptation(system, n0, signal, sig, product, options);

  const bool pairing_zero = rep.pairing && std::abs(*rep.pairing) <= rep.pairing_tol;
  if (rep.closed.closed && rep.connectivity.connected && rep.pairing && !pairing_zero) {
    rep.conclusion = "no robust adaptation";
    rep.prediction_holds = !rep.simulation.returns;
  } else if (rep.closed.detailed_balance && rep.graph_connected && rep.product_unconserved && rep.responds.value_or(false)) {
    rep.conclusion = "adaptation (generic)";
    rep.prediction_holds = rep.simulation.adapts;
  } else if (rep.closed.closed && rep.pairing && !rep.same_class) {
    rep.conclusion = "adaptation despite closedness (factorized conservation laws)";
    rep.prediction_holds = rep.simulation.returns;
  } else if (rep.closed.closed && pairing_zero) {
    rep.conclusion = "fine-tuned";
  } else {
    rep.conclusion = "no structural prediction";
  }
  return rep;
}

}  // namespace crn
