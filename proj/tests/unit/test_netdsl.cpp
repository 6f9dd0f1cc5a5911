#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "common.hpp"
#include "crn/error.hpp"
#include "crn/models.hpp"
#include "crn/netdsl.hpp"
#include "crn/random.hpp"

using namespace crn;

namespace {

ParseError parse_error(const std::string& text) {
  try {
    parse_network(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no ParseError for: " << text);
  return ParseError(0, 0, "");
}

}  // namespace

TEST_CASE("format example") {
  const auto d = parse_network(
      "# comment\n"
      "species: A, B, C\n"
      "A + 2 B <-> C @ kf=1.0, kr=0.5\n"
      "C -> 0 @ k=2e-3\n"
      "signal: A\n"
      "product: C\n"
      "init: A=1, B=0.5\n");
  const auto& net = d.system.network();
  REQUIRE(net.num_species() == 3);
  REQUIRE(net.num_reactions() == 3);
  CHECK(net.reaction(0).stoich() == Stoich{-1, -2, 1});
  CHECK(net.reaction(1).stoich() == Stoich{1, 2, -1});
  CHECK(net.reaction(2).stoich() == Stoich{0, 0, -1});
  CHECK(d.system.rates() == RateFunction{1.0, 0.5, 2e-3});
  CHECK(d.signal == std::optional<std::size_t>{0});
  CHECK(d.product == std::optional<std::size_t>{2});
  REQUIRE(d.initial_state);
  CHECK(*d.initial_state == std::vector<double>{1.0, 0.5, 0.0});
}

TEST_CASE("species are inferred in order of appearance without a declaration") {
  const auto d = parse_network("X + Y -> Z @ k=1\n0 -> X @ k=3");
  CHECK(d.system.network().species() == std::vector<std::string>{"X", "Y", "Z"});
  CHECK(d.system.network().reaction(1).is_source());
  CHECK_FALSE(d.signal);
  CHECK_FALSE(d.initial_state);
}

TEST_CASE("errors carry line and column") {
  {
    const auto e = parse_error("A + B <-> A @ kf=1, kr=1");
    CHECK(e.line() == 1);
    CHECK(e.column() == 11);
  }
  {
    const auto e = parse_error("A <-> B @ kf=1, kr=1\nB -> A @ k=2");
    CHECK(e.line() == 2);
    CHECK(e.column() == 1);
  }
  {
    const auto e = parse_error("A -> B @ k=0");
    CHECK(e.line() == 1);
    CHECK(e.column() == 10);
  }
  {
    const auto e = parse_error("\n\nA -> B @ k=-1.5");
    CHECK(e.line() == 3);
  }
  {
    const auto e = parse_error("species: A, B, C\nA -> B @ k=1");
    CHECK(e.line() == 1);
  }
  {
    const auto e = parse_error("species: A, B\nA -> Q @ k=1");
    CHECK(e.line() == 2);
    CHECK(e.column() == 6);
  }
  CHECK(parse_error("A <-> B @ kf=1").line() == 1);
  CHECK(parse_error("A => B @ k=1").line() == 1);
  CHECK(parse_error("A -> B @ k=1\nsignal: Z").line() == 2);
  CHECK(parse_error("A -> B @ k=1\ninit: A=1, A=2").line() == 2);
  CHECK(parse_error("A -> B @ k=1\ninit: A=-1").line() == 2);
  CHECK(parse_error("A -> B @ k=1, k=2").line() == 1);
  CHECK(parse_error("A -> B @ k=inf").line() == 1);
  CHECK(parse_error("0 -> 0 @ k=1").line() == 1);
  CHECK(parse_error("0 A -> B @ k=1").line() == 1);
  CHECK(parse_error("# only a comment\n").line() >= 1);
}

TEST_CASE("parser is total: every byte string parses or raises ParseError") {
  Rng rng(99);
  const std::string alphabet = "AB0129 +-<>@=,.:#ekfr\nsignalpoductinit";
  const std::string seed = "species: A, B\nA + B <-> 2 B @ kf=1, kr=2\nB -> 0 @ k=1\nsignal: A\ninit: A=1\n";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text = seed;
    const int edits = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < edits; ++k) {
      const std::size_t pos = rng() % (text.size() + 1);
      const char c = alphabet[rng() % alphabet.size()];
      switch (rng() % 3) {
        case 0: text.insert(text.begin() + static_cast<std::ptrdiff_t>(pos), c); break;
        case 1: if (pos < text.size()) text.erase(pos, 1); break;
        default: if (pos < text.size()) text[pos] = c; break;
      }
    }
    try {
      const auto d = parse_network(text);
      CHECK(equivalent(parse_network(serialize_network(d)), d));
    } catch (const ParseError&) {
    } catch (const std::exception& e) {
      FAIL("unexpected exception '" << e.what() << "' for input:\n" << text);
    }
  }
}

TEST_CASE("serialize round trip") {
  for (const auto& id : builtin_ids()) {
    const auto m = builtin(id);
    if (!m.document) continue;
    CAPTURE(id);
    const std::string text = serialize_network(*m.document);
    const auto back = parse_network(text);
    CHECK(equivalent(back, *m.document));
    CHECK(serialize_network(back) == text);
  }

  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto net = random_connected_network(rng, 2 + rng() % 5);
    const NetworkDocument d{KineticSystem(net, random_rates(net, rng, 3.0)), 0, net.num_species() - 1, std::nullopt};
    CHECK(equivalent(parse_network(serialize_network(d)), d));
  }
}

TEST_CASE("one-way pairs and reversible pairs serialize distinguishably") {
  const auto d = parse_network("A -> B @ k=1\nB -> A @ k=2");
  const auto back = parse_network(serialize_network(d));
  CHECK(equivalent(back, d));
  CHECK_FALSE(equivalent(parse_network("A -> B @ k=1\nB -> A @ k=3"), d));
}

TEST_CASE("missing file") { CHECK_THROWS_AS(parse_network_file("/nonexistent/x.crn"), InvalidNetwork); }
