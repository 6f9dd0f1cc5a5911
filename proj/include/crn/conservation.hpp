#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "crn/network.hpp"
#include "crn/rational.hpp"

namespace crn {

/// N x |R_s| integer matrix whose columns are the canonical_half reactions.
struct StoichMatrix {
  std::vector<std::size_t> columns;  // reaction indices, canonical order
  RationalMatrix matrix;
};

StoichMatrix stoich_matrix(const ReactionNetwork& network);

/// Conservation laws: the left kernel {m : m^T R = 0 for all R}. One basis
/// vector per free column of the reduced echelon form of S^T.
std::vector<RationalVector> conservation_space(const ReactionNetwork& network);

/// Cycles: the right kernel {c : sum_R c(R) R = 0}, indexed like
/// StoichMatrix::columns.
std::vector<RationalVector> cycle_space(const ReactionNetwork& network);

/// Extreme rays m_1..m_L of the cone {m >= 0 : m^T R = 0}, each a primitive
/// nonnegative integer vector, sorted lexicographically.
class ConservationBasis {
 public:
  ConservationBasis(std::size_t num_species, std::vector<std::vector<std::int64_t>> rays);

  std::size_t num_species() const { return num_species_; }
  std::size_t size() const { return rays_.size(); }
  bool empty() const { return rays_.empty(); }
  const std::vector<std::vector<std::int64_t>>& rays() const { return rays_; }
  const std::vector<std::int64_t>& ray(std::size_t k) const { return rays_.at(k); }

  /// L x N matrix with row k equal to m_k.
  Matrix matrix() const;
  /// m^(i): the coefficients of species i across the rays (length L).
  std::vector<std::int64_t> per_species(std::size_t i) const;
  /// True when the rays are linearly independent.
  bool independent() const;
  /// True when some ray has a positive entry at species i.
  bool touches(std::size_t i) const;

 private:
  std::size_t num_species_;
  std::vector<std::vector<std::int64_t>> rays_;
};

/// Double description on the orthant, intersecting one stoichiometric
/// hyperplane at a time in canonical column order.
ConservationBasis extreme_rays(const ReactionNetwork& network);

/// Conservative iff the componentwise sum of the extreme rays is positive.
bool is_conservative(const ConservationBasis& basis);
bool is_conservative(const ReactionNetwork& network);

struct MConnectivity {
  /// Species are M-connected when the graph with an edge for every nonzero
  /// <m^(i), m^(j)> is connected and no species has m^(i) = 0.
  bool connected = false;
  /// Stronger: <m^(i), m^(j)> != 0 for every pair i <= j.
  bool pairwise = false;
  /// Pairs (i, j), i <= j, whose inner product vanishes.
  std::vector<std::pair<std::size_t, std::size_t>> failing_pairs;
  /// Connected components of that graph, each ascending.
  std::vector<std::vector<std::size_t>> components;
};

MConnectivity m_connectivity(const ConservationBasis& basis);

/// Everything the `conservation` report needs in one pass.
struct ConservationReport {
  std::size_t dim = 0;
  std::size_t cycle_dim = 0;
  std::vector<RationalVector> space;
  std::vector<RationalVector> cycles;
  ConservationBasis rays{0, {}};
  bool conservative = false;
  MConnectivity connectivity;
};

ConservationReport analyze_conservation(const ReactionNetwork& network);

}  // namespace crn
