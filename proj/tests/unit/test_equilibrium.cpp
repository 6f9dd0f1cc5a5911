#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "common.hpp"
#include "crn/conservation.hpp"
#include "crn/dynamics.hpp"
#include "crn/equilibrium.hpp"
#include "crn/error.hpp"
#include "crn/random.hpp"

using namespace crn;
using crn::test::at;
using crn::test::sys;
using crn::test::vec;

TEST_CASE("log rate ratios and detailed balance on A <-> B") {
  const auto s = sys("A <-> B @ kf=2, kr=1");
  CHECK(log_rate_ratios(s)[0] == doctest::Approx(std::log(0.5)));
  const auto cert = check_detailed_balance(s);
  REQUIRE(cert.holds);
  REQUIRE(cert.energy);
  const Vector e = *cert.energy;
  CHECK(e(1) - e(0) == doctest::Approx(-std::log(2.0)));
  CHECK(e.sum() == doctest::Approx(0.0).epsilon(1e-14));
  const Vector z = equilibrium_state(e);
  for (std::size_t r = 0; r < 2; ++r) CHECK(reaction_flux(s, r, z) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("Wegscheider violation on Segel-Goldbeter") {
  const auto base = builtin("segel-goldbeter").document->system;
  CHECK(check_detailed_balance(base).holds);
  for (double a : cycle_affinities(base)) CHECK(std::abs(a) < 1e-12);

  auto rates = base.rates();
  rates[1] *= std::exp(1.0);  // X -> R + L
  const auto broken = base.with_rates(rates);
  const auto cert = check_detailed_balance(broken);
  CHECK_FALSE(cert.holds);
  REQUIRE(cert.violation);
  CHECK(std::abs(cert.violation->affinity) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.violation->cycle.size() == 4);
  const auto aff = cycle_affinities(broken);
  REQUIRE(aff.size() == 1);
  CHECK(std::abs(aff[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("acyclic networks are balanced for every rate draw") {
  const auto net = builtin("gene-expression-completion").document->system.network();
  Rng rng(3);
  for (int k = 0; k < 50; ++k) CHECK(check_detailed_balance(KineticSystem(net, random_rates(net, rng, 2.0))).holds);
}

TEST_CASE("make_db_rates on the two-step example") {
  const auto net = builtin("two-step").document->system.network();
  const Vector e = vec({0.0, 0.5, -0.25, 0.3});
  const auto rates = make_db_rates(net, e, {2.0, 3.0});
  // canonical members are s1 -> s2 + s3 and s2 -> s3 + s4
  CHECK(rates[1] == 2.0);
  CHECK(rates[0] == doctest::Approx(2.0 * std::exp(-0.0 + 0.5 - 0.25)));
  CHECK(rates[3] == 3.0);
  CHECK(rates[2] == doctest::Approx(3.0 * std::exp(-0.5 - 0.25 + 0.3)));
  const KineticSystem s(net, rates);
  CHECK(forward_rates(s) == std::vector<double>{2.0, 3.0});
  const Vector z = equilibrium_state(e);
  CHECK(rhs(s, z).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("gauge shifts along conservation laws leave the rates unchanged") {
  const auto net = builtin("segel-goldbeter").document->system.network();
  const Vector e = vec({0.1, -0.2, 0.4, 0.0, 0.3});
  const auto rays = extreme_rays(net);
  const Vector shifted = e + 0.7 * test::vec(rays.ray(0)) - 1.3 * test::vec(rays.ray(1));
  const std::vector<double> fwd{1.0, 2.0, 0.5, 3.0};
  const auto a = make_db_rates(net, e, fwd), b = make_db_rates(net, shifted, fwd);
  for (std::size_t r = 0; r < a.size(); ++r) CHECK(a[r] == doctest::Approx(b[r]).epsilon(1e-13));
}

TEST_CASE("is_closed") {
  const auto c = is_closed(builtin("segel-goldbeter").document->system);
  CHECK(c.closed);
  CHECK(c.detailed_balance);
  CHECK(c.conservative);
  CHECK(c.boundary_free);

  const auto ge = is_closed(builtin("gene-expression").document->system);
  CHECK_FALSE(ge.closed);
  CHECK(ge.detailed_balance);
  CHECK_FALSE(ge.boundary_free);

  const auto ex = is_closed(builtin("example-3.2").document->system);
  CHECK_FALSE(ex.closed);
  CHECK_FALSE(ex.conservative);

  const auto oneway = is_closed(sys("A -> B @ k=1"));
  CHECK_FALSE(oneway.detailed_balance);
  CHECK_FALSE(oneway.closed);
}

TEST_CASE("equilibrium_from_totals") {
  Matrix laws(1, 2);
  laws << 1, 1;
  const Vector e = equilibrium_from_totals(Vector::Zero(2), laws, vec({4.0}));
  const Vector z = equilibrium_state(e);
  CHECK(z(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(z(1) == doctest::Approx(2.0).epsilon(1e-12));

  const auto net = builtin("segel-goldbeter").document->system.network();
  const auto rays = extreme_rays(net);
  const Vector e0 = vec({0.1, -0.2, 0.4, 0.0, 0.3});
  const Vector totals = rays.matrix() * equilibrium_state(e0);
  const Vector fixed = equilibrium_from_totals(e0, rays, totals);
  CHECK((fixed - e0).lpNorm<Eigen::Infinity>() < 1e-12);

  const Vector target = vec({5.0, 0.5});
  const Vector e1 = equilibrium_from_totals(e0, rays, target);
  CHECK((rays.matrix() * equilibrium_state(e1) - target).lpNorm<Eigen::Infinity>() < 1e-11);
  // the solution differs from e0 only along the laws
  Matrix m = conservation_matrix(net);
  const Vector d = e1 - e0;
  const Vector proj = m.transpose() * (m * m.transpose()).ldlt().solve(m * d);
  CHECK((proj - d).lpNorm<Eigen::Infinity>() < 1e-10);

  CHECK_THROWS_AS(equilibrium_from_totals(e0, rays, vec({-1.0, 1.0})), InvalidParams);
  CHECK_THROWS_AS(equilibrium_from_totals(e0, rays, vec({1.0})), InvalidParams);
}

TEST_CASE("delta vector") {
  const auto s = sys("A <-> B @ kf=1, kr=148.4131591025766");
  const auto d = delta_from_rates(s, Vector::Zero(2));
  REQUIRE(d.size() == 1);
  CHECK(d[0] == doctest::Approx(5.0).epsilon(1e-13));

  const auto net = builtin("segel-goldbeter").document->system.network();
  const Vector e = vec({0.1, -0.2, 0.4, 0.0, 0.3});
  const std::vector<double> fwd{1.0, 2.0, 0.5, 3.0}, delta{0.5, -1.0, 0.0, 2.0};
  const KineticSystem k(net, rates_with_delta(net, e, fwd, delta));
  const auto back = delta_from_rates(k, e);
  for (std::size_t c = 0; c < delta.size(); ++c) CHECK(back[c] == doctest::Approx(delta[c]).scale(1.0).epsilon(1e-13));
  CHECK_FALSE(check_detailed_balance(k).holds);
  const KineticSystem db(net, rates_with_delta(net, e, fwd, {0.0, 0.0, 0.0, 0.0}));
  CHECK(check_detailed_balance(db).holds);
}

TEST_CASE("one-directional limit") {
  const auto s = sys("A <-> B @ kf=1, kr=3\nB <-> C @ kf=2, kr=2");
  const auto one = one_directional_limit(s);
  REQUIRE(one.network().num_reactions() == 2);
  CHECK(one.network().reaction(0).stoich() == Stoich{1, -1, 0});
  CHECK(one.rate(0) == 3.0);
  CHECK(one.network().reaction(1).stoich() == Stoich{0, -1, 1});
}

namespace {

// Largest relative gap between gene-expression with uniform delta and its
// one-directional limit. The kept directions run at unit rate, the dropped
// ones at e^{-delta}.
double one_directional_gap(double delta) {
  ParamMap params{{"delta", delta}};
  for (int k = 1; k <= 6; ++k) params["k" + std::to_string(k)] = std::exp(-delta);
  const auto full = builtin("gene-expression", params).document->system;
  for (double v : delta_from_rates(full, Vector::Zero(6))) CHECK(v == doctest::Approx(delta));
  const auto limit = one_directional_limit(full);
  for (double k : limit.rates()) CHECK(k == doctest::Approx(1.0));
  SimulationConfig cfg;
  cfg.t_max = 10.0;
  cfg.detect_steady = false;
  cfg.stops = {1.0, 2.5, 5.0, 10.0};
  const Vector n0 = Vector::Ones(6);
  const auto a = simulate_kinetic(full, n0, cfg);
  const auto b = simulate_kinetic(limit, n0, cfg);
  double gap = 0.0;
  for (double t : cfg.stops) {
    const auto ia = static_cast<std::size_t>(std::find(a.times.begin(), a.times.end(), t) - a.times.begin());
    const auto ib = static_cast<std::size_t>(std::find(b.times.begin(), b.times.end(), t) - b.times.begin());
    REQUIRE(ia < a.size());
    REQUIRE(ib < b.size());
    const Vector& y = b.states[ib];
    gap = std::max(gap, (a.states[ia] - y).lpNorm<Eigen::Infinity>() / y.lpNorm<Eigen::Infinity>());
  }
  return gap;
}

}  // namespace

TEST_CASE("large uniform delta approaches the one-directional system") {
  const double g10 = one_directional_gap(10.0);
  const double g5 = one_directional_gap(5.0);
  CHECK(g10 <= 1e-2);
  CHECK(g10 < g5);
}
