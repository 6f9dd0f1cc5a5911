#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crn/network.hpp"

namespace crn {

/// A kinetic system plus the signal/product designations and an optional
/// initial state, as read from a `.crn` file.
struct NetworkDocument {
  KineticSystem system;
  std::optional<std::size_t> signal;
  std::optional<std::size_t> product;
  std::optional<std::vector<double>> initial_state;
};

/// Parses the line-oriented `.crn` format:
///
///   # comment
///   species: A, B, C
///   A + 2 B <-> C @ kf=1.0, kr=0.5
///   C -> 0 @ k=2e-3
///   signal: A
///   product: C
///   init: A=1, B=0.5
///
/// Throws ParseError carrying the offending line and column.
NetworkDocument parse_network(std::string_view text);
NetworkDocument parse_network_file(const std::string& path);

/// Inverse of parse_network. Reversible pairs are written as one `<->` line,
/// rates with 17 significant digits.
std::string serialize_network(const NetworkDocument& doc);

/// Structural equality: same species order, same set of (reaction, rate)
/// entries, same annotations.
bool equivalent(const NetworkDocument& a, const NetworkDocument& b);

}  // namespace crn
