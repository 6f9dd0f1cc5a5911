#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "common.hpp"
#include "crn/error.hpp"
#include "crn/network.hpp"

using namespace crn;
using crn::test::sys;

TEST_CASE("reaction sides") {
  const Reaction r({-1, -2, 1, 0});
  CHECK(r.initial() == std::vector<std::size_t>{0, 1});
  CHECK(r.final() == std::vector<std::size_t>{2});
  CHECK(r.domain() == std::vector<std::size_t>{0, 1, 2});
  CHECK_FALSE(r.is_source());
  CHECK_FALSE(r.is_sink());
  CHECK(r.reversed().stoich() == Stoich{1, 2, -1, 0});
  CHECK(Reaction({0, 1}).is_source());
  CHECK(Reaction({-1, 0}).is_sink());
  CHECK_THROWS_AS(Reaction({0, 0}), InvalidNetwork);
}

TEST_CASE("network construction enforces the standing assumptions") {
  CHECK_THROWS_AS(ReactionNetwork({"A", "B", "C"}, {Reaction({-1, 1, 0})}), InvalidNetwork);
  CHECK_THROWS_AS(ReactionNetwork({"A", "A"}, {Reaction({-1, 1})}), InvalidNetwork);
  CHECK_THROWS_AS(ReactionNetwork({"A", "B"}, {Reaction({-1, 1}), Reaction({-1, 1})}), InvalidNetwork);
  CHECK_THROWS_AS(ReactionNetwork({"A", "B"}, {Reaction({-1, 1, 0})}), InvalidNetwork);
  CHECK_THROWS_AS(ReactionNetwork({"A", ""}, {Reaction({-1, 1})}), InvalidNetwork);
  CHECK_THROWS_AS(ReactionNetwork({}, {}), InvalidNetwork);

  const ReactionNetwork net({"A", "B"}, {Reaction({-1, 1}), Reaction({1, -1})});
  CHECK(net.species_index("B") == std::optional<std::size_t>{1});
  CHECK_FALSE(net.species_index("Z").has_value());
  CHECK_THROWS_AS(net.require_species("Z"), InvalidNetwork);
  CHECK(net.reverse_of(0) == std::optional<std::size_t>{1});
  CHECK(net.describe(0) == "A -> B");
}

TEST_CASE("is_bidirectional") {
  CHECK(is_bidirectional(sys("A <-> B @ kf=1, kr=1").network()));
  CHECK_FALSE(is_bidirectional(sys("A -> B @ k=1").network()));
  CHECK_FALSE(is_bidirectional(sys("A <-> B @ kf=1, kr=1\nB -> C @ k=1").network()));
}

TEST_CASE("canonical_half picks one member per pair") {
  const auto ge = builtin("gene-expression").document->system.network();
  CHECK(ge.num_reactions() == 12);
  const auto half = canonical_half(ge);
  CHECK(half.size() == 6);
  for (std::size_t r : half) {
    const auto& rx = ge.reaction(r);
    const auto i = rx.initial(), f = rx.final();
    const double mi = i.empty() ? INFINITY : static_cast<double>(i.front());
    const double mf = f.empty() ? INFINITY : static_cast<double>(f.front());
    CHECK(mi < mf);
  }

  // A <-> 0: the sink direction has min I = 0 < min F = +inf.
  const auto src = sys("0 <-> A @ kf=1, kr=2").network();
  const auto h = canonical_half(src);
  REQUIRE(h.size() == 1);
  CHECK(src.reaction(h[0]).is_sink());

  // Unpaired reactions are kept whatever their orientation.
  const auto one = sys("B -> A @ k=1").network();
  CHECK(canonical_half(one) == std::vector<std::size_t>{0});
}

TEST_CASE("has_boundary_reactions") {
  CHECK(has_boundary_reactions(builtin("gene-expression").document->system.network()));
  CHECK(has_boundary_reactions(builtin("open-exchange").document->system.network()));
  CHECK_FALSE(has_boundary_reactions(builtin("two-step").document->system.network()));
  CHECK_FALSE(has_boundary_reactions(builtin("segel-goldbeter").document->system.network()));
}

TEST_CASE("kinetic system rates") {
  const auto s = sys("A <-> B @ kf=2, kr=3\nB -> C @ k=1");
  CHECK(s.rate(0) == 2.0);
  CHECK(s.reverse_rate(0) == 3.0);
  CHECK_THROWS_AS(s.reverse_rate(2), NotBidirectional);
  CHECK_THROWS_AS(KineticSystem(s.network(), {1.0, 1.0}), InvalidNetwork);
  CHECK_THROWS_AS(KineticSystem(s.network(), {1.0, -1.0, 1.0}), InvalidNetwork);
  CHECK_THROWS_AS(KineticSystem(s.network(), {1.0, 0.0, 1.0}), InvalidNetwork);
}
