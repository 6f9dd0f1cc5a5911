#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace crn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Stoich = std::vector<int>;

/// A reaction as its net stoichiometric vector R in Z^N. Reactants carry
/// negative entries, products positive ones, so a species can never sit on
/// both sides.
class Reaction {
 public:
  explicit Reaction(Stoich stoich);

  const Stoich& stoich() const { return stoich_; }
  std::size_t size() const { return stoich_.size(); }
  int operator[](std::size_t i) const { return stoich_[i]; }

  /// I(R): species with R(i) < 0.
  std::vector<std::size_t> initial() const;
  /// F(R): species with R(i) > 0.
  std::vector<std::size_t> final() const;
  /// D(R) = I(R) u F(R), ascending.
  std::vector<std::size_t> domain() const;

  bool is_source() const;  // I(R) empty
  bool is_sink() const;    // F(R) empty

  Reaction reversed() const;

  friend bool operator==(const Reaction&, const Reaction&) = default;
  friend auto operator<=>(const Reaction&, const Reaction&) = default;

 private:
  Stoich stoich_;
};

/// Species set plus reactions. Immutable once constructed; the constructor
/// enforces the standing assumptions (nonempty unique names, every species
/// takes part in some reaction, no duplicate reactions).
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  std::size_t num_species() const { return species_.size(); }
  std::size_t num_reactions() const { return reactions_.size(); }

  const std::vector<std::string>& species() const { return species_; }
  const std::string& species_name(std::size_t i) const { return species_.at(i); }
  std::optional<std::size_t> species_index(std::string_view name) const;
  /// Like species_index but throws InvalidNetwork for unknown names.
  std::size_t require_species(std::string_view name) const;

  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t r) const { return reactions_.at(r); }

  std::optional<std::size_t> find(const Reaction& reaction) const;
  /// Index of -R when the network contains it.
  std::optional<std::size_t> reverse_of(std::size_t r) const { return reverse_.at(r); }

  /// Human-readable form, e.g. "A + 2 B -> C".
  std::string describe(std::size_t r) const;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  std::vector<std::optional<std::size_t>> reverse_;
  std::unordered_map<std::string, std::size_t> index_;
};

bool is_bidirectional(const ReactionNetwork& network);

/// Representative subset R_s: every unpaired reaction, and for each pair
/// {R, -R} the member with min I(R) < min F(R) (the minimum of an empty set
/// counts as +infinity). Indices into network.reactions(), in the order of
/// first appearance of the pair.
std::vector<std::size_t> canonical_half(const ReactionNetwork& network);

/// True if some reaction is a pure source (0 -> ...) or a pure sink (... -> 0).
bool has_boundary_reactions(const ReactionNetwork& network);

/// Rate per reaction, aligned with network.reactions().
using RateFunction = std::vector<double>;

class KineticSystem {
 public:
  KineticSystem(ReactionNetwork network, RateFunction rates);

  const ReactionNetwork& network() const { return network_; }
  const RateFunction& rates() const { return rates_; }
  double rate(std::size_t r) const { return rates_.at(r); }
  /// K(-R); throws NotBidirectional when -R is absent.
  double reverse_rate(std::size_t r) const;

  std::size_t num_species() const { return network_.num_species(); }

  KineticSystem with_rates(RateFunction rates) const { return {network_, std::move(rates)}; }

 private:
  ReactionNetwork network_;
  RateFunction rates_;
};

}  // namespace crn
