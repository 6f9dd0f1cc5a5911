#pragma once

#include <cstdint>
#include <random>

namespace crn {

using Rng = std::mt19937_64;

/// Uniform double in [a, b) from the top 53 bits; identical across standard
/// libraries, unlike std::uniform_real_distribution.
inline double uniform(Rng& rng, double a, double b) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return a + (b - a) * u;
}

}  // namespace crn
