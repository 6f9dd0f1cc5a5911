#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "common.hpp"
#include "crn/dynamics.hpp"
#include "crn/equilibrium.hpp"
#include "crn/error.hpp"
#include "crn/random.hpp"
#include "crn/response.hpp"

using namespace crn;
using crn::test::at;
using crn::test::init_of;
using crn::test::sys;
using crn::test::vec;

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Leading coefficient of phi_target from the series phi = sum_k B^k a slope t^{k+2}/(k+2)!,
// where B is A without the signal row and column and a is the signal column.
long double series_oracle(const LinearizedSystem& lin, std::size_t target, std::size_t depth) {
  const auto s = at(lin.signal);
  LMatrix b = lin.A.cast<long double>();
  LVector v = b.col(s);
  v(s) = 0;
  b.row(s).setZero();
  b.col(s).setZero();
  long double fact = 2;
  for (std::size_t k = 1; k < depth; ++k) {
    v = b * v;
    fact *= static_cast<long double>(k + 2);
  }
  return static_cast<long double>(lin.slope) * v(at(target)) / fact;
}

Vector energy_of(const NetworkDocument& d) { return -init_of(d).array().log().matrix(); }

KineticSystem two_step(double e2, double e3) {
  return builtin("two-step", {{"E2", e2}, {"E3", e3}, {"K1", 1.3}, {"K2", 0.7}}).document->system;
}

}  // namespace

TEST_CASE("species graph") {
  const auto g = species_graph(sys("A <-> B @ kf=1, kr=1").network());
  CHECK(g.adjacent(0, 1));
  CHECK(g.adjacency[0] == std::vector<std::size_t>{1});

  const auto ex = species_graph(builtin("example-3.2").document->system.network());
  CHECK_FALSE(ex.adjacent(0, 3));
  CHECK(ex.distances(0)[3] == 2);
  CHECK(ex.components().size() == 1);

  const auto two = species_graph(sys("A <-> B @ kf=1, kr=1\nC <-> D @ kf=1, kr=1").network());
  CHECK(two.components() == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}});
  CHECK(two.distances(0)[2] == SIZE_MAX);
}

TEST_CASE("layer hierarchy") {
  const auto ts = builtin("two-step").document->system.network();
  const auto h = layer_hierarchy(ts, 0, 3);
  CHECK(h.depth == 2);
  CHECK(h.layers == std::vector<std::vector<std::size_t>>{{0}, {1, 2}, {3}});
  CHECK(hierarchy_consistent(ts, h));

  const auto adj = layer_hierarchy(ts, 0, 1);
  CHECK(adj.depth == 1);
  CHECK(adj.layers.back() == std::vector<std::size_t>{1});

  const auto chain = sys("A <-> B @ kf=1, kr=1\nB <-> C @ kf=1, kr=1\nC <-> D @ kf=1, kr=1\nD <-> E @ kf=1, kr=1");
  const auto hc = layer_hierarchy(chain.network(), 0, 4);
  CHECK(hc.depth == 4);
  CHECK(hierarchy_consistent(chain.network(), hc));

  CHECK_THROWS_AS(layer_hierarchy(sys("A <-> B @ kf=1, kr=1\nC <-> D @ kf=1, kr=1").network(), 0, 3), NotConnected);

  Rng rng(6);
  for (int k = 0; k < 30; ++k) {
    const auto net = random_connected_network(rng, 2 + rng() % 5);
    CHECK(hierarchy_consistent(net, layer_hierarchy(net, 0, net.num_species() - 1)));
  }
}

TEST_CASE("shortest path tie-break") {
  const auto ex = species_graph(builtin("example-3.2").document->system.network());
  CHECK(shortest_path(ex, 0, 3) == std::vector<std::size_t>{0, 1, 3});
  CHECK(shortest_path(ex, 0, 0) == std::vector<std::size_t>{0});
}

TEST_CASE("linearized matrix") {
  const auto ab = linearized_matrix(sys("A <-> B @ kf=1, kr=1"), Vector::Zero(2), 0);
  CHECK(ab.A(1, 0) == doctest::Approx(1.0));
  CHECK(ab.A(1, 1) == doctest::Approx(-1.0));
  CHECK(ab.A.row(0).norm() == 0.0);
  CHECK(ab.slope == doctest::Approx(1.0));

  // two-step: dphi2/dt = K1 e^{-E3} phi1 + ...
  const Vector e = vec({0.2, 0.5, -0.25, 0.3});
  const auto net = builtin("two-step").document->system.network();
  const KineticSystem ts(net, make_db_rates(net, e, {1.3, 0.7}));
  const auto lin = linearized_matrix(ts, e, 0);
  const double k1 = ts.rate(0);  // s2 + s3 -> s1
  CHECK(lin.A(1, 0) == doctest::Approx(k1 * std::exp(-e(2))));
  CHECK(lin.slope == doctest::Approx(std::exp(e(0))));

  Rng rng(12);
  for (int k = 0; k < 20; ++k) {
    const auto rn = random_connected_network(rng, 2 + rng() % 5);
    const auto db = random_db_rates(rn, rng);
    const KineticSystem s(rn, db.rates);
    const std::size_t sig = 0;
    const auto l = linearized_matrix(s, db.energy, sig);
    const OdeRhs f = [&](double, const Vector& y, Vector& dy) { dy = rhs(s, y); };
    const Vector z = equilibrium_state(db.energy);
    Matrix fd = db.energy.array().exp().matrix().asDiagonal() * finite_difference_jacobian(f, 0.0, z) *
                z.asDiagonal();
    fd.row(at(sig)).setZero();
    for (Eigen::Index i = 0; i < fd.rows(); ++i)
      for (Eigen::Index j = 0; j < fd.cols(); ++j)
        CHECK(std::abs(fd(i, j) - l.A(i, j)) <= 1e-6 * std::max(1.0, std::abs(l.A(i, j))));
  }
}

TEST_CASE("response coefficients agree with both oracles") {
  Rng rng(2024);
  int tested = 0;
  for (int k = 0; k < 20; ++k) {
    const auto rn = random_connected_network(rng, 2 + rng() % 5);
    const auto db = random_db_rates(rn, rng);
    const KineticSystem s(rn, db.rates);
    const std::size_t p = rn.num_species() - 1;
    const auto lin = linearized_matrix(s, db.energy, 0);
    const auto h = layer_hierarchy(rn, 0, p);
    const auto rep = response_coefficients(lin, h);
    CHECK(rep.depth == h.depth);
    const double tay = taylor_oracle(lin, p, h.depth + 1);
    const auto ser = static_cast<double>(series_oracle(lin, p, h.depth));
    CHECK(std::abs(rep.c_lp - tay) <= 1e-10 * std::abs(tay) + 1e-300);
    CHECK(std::abs(rep.c_lp - ser) <= 1e-10 * std::abs(ser) + 1e-300);
    // lower Taylor coefficients of phi_p vanish
    const auto series = taylor_series(lin, h.depth + 1);
    for (std::size_t j = 0; j <= h.depth; ++j) CHECK(series[j](at(p)) == 0.0);
    // every layer member has its own leading coefficient
    for (std::size_t n = 0; n < h.layers.size(); ++n)
      for (std::size_t m = 0; m < h.layers[n].size(); ++m) {
        const double c = rep.coefficients[n][m];
        const double t = n == 0 ? lin.slope : taylor_oracle(lin, h.layers[n][m], n + 1);
        CHECK(std::abs(c - t) <= 1e-10 * std::abs(t) + 1e-300);
      }
    ++tested;
  }
  CHECK(tested == 20);

  const auto ab = linearized_matrix(sys("A <-> B @ kf=1, kr=1"), Vector::Zero(2), 0);
  CHECK(taylor_oracle(ab, 1, 2) == doctest::Approx(0.5));
}

TEST_CASE("two-step coefficient vanishes exactly at E2 = E3") {
  auto coeff = [](double e2, double e3) {
    const auto s = two_step(e2, e3);
    const Vector e = vec({0.0, e2, e3, 0.3});
    const auto lin = linearized_matrix(s, e, 0);
    return response_coefficients(lin, layer_hierarchy(s.network(), 0, 3));
  };
  const auto flat = coeff(0.3, 0.3);
  CHECK(std::abs(flat.c_lp) <= 1e-12);
  CHECK_FALSE(flat.responds);
  for (auto [e2, e3] : {std::pair{0.35, 0.25}, std::pair{0.2, 0.3}, std::pair{-1.0, 0.5}}) {
    const auto r = coeff(e2, e3);
    CHECK(r.responds);
    CHECK(std::abs(r.c_lp) >= 1e-6 * r.scale);
    // proportional to K1 K2 e^{-E3} (e^{-E3} - e^{-E2})
    const double closed = 1.3 * 0.7 * std::exp(-e3) * (std::exp(-e3) - std::exp(-e2));
    CHECK(r.c_lp / closed == doctest::Approx(coeff(0.35, 0.25).c_lp /
                                             (1.3 * 0.7 * std::exp(-0.25) * (std::exp(-0.25) - std::exp(-0.35))))
                                 .epsilon(1e-10));
  }
}

TEST_CASE("example-3.2 is fine tuned") {
  const auto d = *builtin("example-3.2").document;
  const Vector e = *check_detailed_balance(d.system).energy;
  const auto rep = response_coefficients(linearized_matrix(d.system, e, 0), layer_hierarchy(d.system.network(), 0, 3));
  CHECK_FALSE(rep.responds);
  CHECK(std::abs(rep.c_lp) <= 1e-12 * std::max(1.0, rep.scale));
}

TEST_CASE("perturb_for_response") {
  SUBCASE("example-3.2") {
    const auto d = *builtin("example-3.2").document;
    const Vector e = energy_of(d);
    const auto out = perturb_for_response(d.system, e, 0, 3, 0.05);
    CHECK(out.report.responds);
    CHECK(out.rate_change < 0.05);
    CHECK(out.path == std::vector<std::size_t>{0, 1, 3});
    const auto cert = check_detailed_balance(out.system);
    CHECK(cert.holds);
    const Vector z = equilibrium_state(out.energy);
    CHECK(rhs(out.system, z).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((out.energy - e).lpNorm<Eigen::Infinity>() <= 0.05 * (1 + 1e-12));
  }
  SUBCASE("already responding") {
    const auto s = two_step(0.5, -0.25);
    const Vector e = vec({0.0, 0.5, -0.25, 0.3});
    const auto out = perturb_for_response(s, e, 0, 3, 0.01);
    CHECK(out.report.responds);
    CHECK(out.rate_change < 0.01);
  }
  SUBCASE("fine-tuned two-step") {
    const auto s = two_step(0.3, 0.3);
    const Vector e = vec({0.0, 0.3, 0.3, 0.3});
    const auto out = perturb_for_response(s, e, 0, 3, 0.01);
    CHECK(out.report.responds);
    CHECK(std::abs(out.energy(1) - out.energy(2)) > 0.0);
    CHECK(check_detailed_balance(out.system).holds);
  }
  CHECK_THROWS_AS(perturb_for_response(two_step(0.3, 0.3), vec({0.0, 0.3, 0.3, 0.3}), 0, 3, 0.0), InvalidParams);
}
