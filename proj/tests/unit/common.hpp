#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "crn/models.hpp"
#include "crn/netdsl.hpp"
#include "crn/network.hpp"

namespace crn::test {

inline NetworkDocument doc(std::string_view text) { return parse_network(text); }

inline KineticSystem sys(std::string_view text) { return parse_network(text).system; }

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vector vec(const std::vector<double>& xs) {
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline Vector vec(const std::vector<std::int64_t>& xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = static_cast<double>(xs[i]);
  return v;
}

inline Vector init_of(const NetworkDocument& d) { return vec(*d.initial_state); }

inline Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

/// Builtins whose networks are closed under their default parameters.
inline std::vector<std::string> closed_builtins() {
  return {"two-step", "m-disconnection", "segel-goldbeter", "gene-expression-completion", "pairing-balance"};
}

}  // namespace crn::test
