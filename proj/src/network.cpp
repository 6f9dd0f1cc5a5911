#include "crn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "crn/error.hpp"

namespace crn {

Reaction::Reaction(Stoich stoich) : stoich_(std::move(stoich)) {
  if (std::all_of(stoich_.begin(), stoich_.end(), [](int v) { return v == 0; })) {
    throw InvalidNetwork("reaction has an all-zero stoichiometric vector");
  }
}

std::vector<std::size_t> Reaction::initial() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stoich_.size(); ++i) {
    if (stoich_[i] < 0) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Reaction::final() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stoich_.size(); ++i) {
    if (stoich_[i] > 0) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Reaction::domain() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stoich_.size(); ++i) {
    if (stoich_[i] != 0) out.push_back(i);
  }
  return out;
}

bool Reaction::is_source() const {
  return std::none_of(stoich_.begin(), stoich_.end(), [](int v) { return v < 0; });
}

bool Reaction::is_sink() const {
  return std::none_of(stoich_.begin(), stoich_.end(), [](int v) { return v > 0; });
}

Reaction Reaction::reversed() const {
  Stoich s(stoich_.size());
  std::transform(stoich_.begin(), stoich_.end(), s.begin(), [](int v) { return -v; });
  return Reaction(std::move(s));
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  if (species_.empty()) throw InvalidNetwork("network has no species");
  if (reactions_.empty()) throw InvalidNetwork("network has no reactions");
  for (std::size_t i = 0; i < species_.size(); ++i) {
    if (species_[i].empty()) throw InvalidNetwork("species name is empty");
    if (!index_.emplace(species_[i], i).second) {
      throw InvalidNetwork("duplicate species name '" + species_[i] + "'");
    }
  }

  std::map<Stoich, std::size_t> seen;
  std::vector<bool> used(species_.size(), false);
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    const auto& s = reactions_[r].stoich();
    if (s.size() != species_.size()) {
      throw InvalidNetwork("reaction " + std::to_string(r) + " has length " +
                           std::to_string(s.size()) + ", expected " +
                           std::to_string(species_.size()));
    }
    if (!seen.emplace(s, r).second) {
      throw InvalidNetwork("duplicate reaction: " + describe(r));
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != 0) used[i] = true;
    }
  }
  for (std::size_t i = 0; i < species_.size(); ++i) {
    if (!used[i]) throw InvalidNetwork("species '" + species_[i] + "' takes part in no reaction");
  }

  reverse_.resize(reactions_.size());
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    Stoich neg(reactions_[r].stoich());
    for (int& v : neg) v = -v;
    if (auto it = seen.find(neg); it != seen.end()) reverse_[r] = it->second;
  }
}

std::optional<std::size_t> ReactionNetwork::species_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ReactionNetwork::require_species(std::string_view name) const {
  if (auto idx = species_index(name)) return *idx;
  throw InvalidNetwork("unknown species '" + std::string(name) + "'");
}

std::optional<std::size_t> ReactionNetwork::find(const Reaction& reaction) const {
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    if (reactions_[r] == reaction) return r;
  }
  return std::nullopt;
}

namespace {

std::string side(const std::vector<std::string>& names, const Stoich& s, int sign) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    int c = s[i] * sign;
    if (c <= 0) continue;
    if (!first) os << " + ";
    if (c != 1) os << c << ' ';
    os << names[i];
    first = false;
  }
  if (first) os << '0';
  return os.str();
}

}  // namespace

std::string ReactionNetwork::describe(std::size_t r) const {
  const auto& s = reactions_.at(r).stoich();
  return side(species_, s, -1) + " -> " + side(species_, s, 1);
}

bool is_bidirectional(const ReactionNetwork& network) {
  for (std::size_t r = 0; r < network.num_reactions(); ++r) {
    if (!network.reverse_of(r)) return false;
  }
  return true;
}

namespace {

std::size_t min_or_inf(const std::vector<std::size_t>& v) {
  return v.empty() ? std::numeric_limits<std::size_t>::max() : v.front();
}

}  // namespace

std::vector<std::size_t> canonical_half(const ReactionNetwork& network) {
  std::vector<std::size_t> out;
  std::vector<bool> done(network.num_reactions(), false);
  for (std::size_t r = 0; r < network.num_reactions(); ++r) {
    if (done[r]) continue;
    done[r] = true;
    auto rev = network.reverse_of(r);
    if (!rev) {
      out.push_back(r);
      continue;
    }
    done[*rev] = true;
    const auto& R = network.reaction(r);
    out.push_back(min_or_inf(R.initial()) < min_or_inf(R.final()) ? r : *rev);
  }
  return out;
}

bool has_boundary_reactions(const ReactionNetwork& network) {
  return std::any_of(network.reactions().begin(), network.reactions().end(),
                     [](const Reaction& R) { return R.is_source() || R.is_sink(); });
}

KineticSystem::KineticSystem(ReactionNetwork network, RateFunction rates)
    : network_(std::move(network)), rates_(std::move(rates)) {
  if (rates_.size() != network_.num_reactions()) {
    throw InvalidNetwork("rate function has " + std::to_string(rates_.size()) +
                         " entries for " + std::to_string(network_.num_reactions()) +
                         " reactions");
  }
  for (std::size_t r = 0; r < rates_.size(); ++r) {
    if (!(rates_[r] > 0.0) || !std::isfinite(rates_[r])) {
      throw InvalidNetwork("rate of reaction '" + network_.describe(r) +
                           "' must be a positive finite number");
    }
  }
}

double KineticSystem::reverse_rate(std::size_t r) const {
  auto rev = network_.reverse_of(r);
  if (!rev) throw NotBidirectional("reaction '" + network_.describe(r) + "' has no reverse");
  return rates_[*rev];
}

}  // namespace crn
