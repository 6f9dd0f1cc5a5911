#pragma once

#include <cstddef>
#include <vector>

#include "crn/network.hpp"

namespace crn {

/// Undirected graph on species; an edge joins two species that occur in a
/// common reaction.
struct SpeciesGraph {
  std::vector<std::vector<std::size_t>> adjacency;  // sorted, no self-loops

  std::size_t size() const { return adjacency.size(); }
  bool adjacent(std::size_t a, std::size_t b) const;
  /// Hop distances from `source`; unreachable species get SIZE_MAX.
  std::vector<std::size_t> distances(std::size_t source) const;
  std::vector<std::vector<std::size_t>> components() const;
};

SpeciesGraph species_graph(const ReactionNetwork& network);

/// BFS shells S_0 = {source}, ..., S_{L-1} and S_L = {target}, plus the
/// canonical reactions linking consecutive shells.
struct LayerHierarchy {
  std::size_t source = 0;
  std::size_t target = 0;
  std::size_t depth = 0;                          // L
  std::vector<std::vector<std::size_t>> layers;   // L + 1 entries
  std::vector<std::vector<std::size_t>> links;    // links[n]: reactions touching S_n and S_{n+1}
};

/// Throws NotConnected when target is unreachable.
LayerHierarchy layer_hierarchy(const ReactionNetwork& network, std::size_t source, std::size_t target);

/// True when the shells and the link sets are pairwise disjoint and every
/// shell member has a neighbour in the previous shell.
bool hierarchy_consistent(const ReactionNetwork& network, const LayerHierarchy& h);

/// Linearization around e^{-E} in the scaled variables phi = e^{E}(n - e^{-E}):
/// dphi/dt = A phi, with the signal row zeroed and the signal component forced
/// as phi_s(t) = slope * t.
struct LinearizedSystem {
  Matrix A;          // N x N
  std::size_t signal = 0;
  double slope = 1.0;  // e^{E(signal)} for a unit-slope signal
  Vector energy;
};

LinearizedSystem linearized_matrix(const KineticSystem& system, const Vector& energy, std::size_t signal);

inline constexpr double kResponseTol = 1e-12;

struct ResponseReport {
  std::size_t depth = 0;
  LayerHierarchy layers;
  /// coefficients[n][k] is the t^{n+1} coefficient of phi for layers.layers[n][k].
  std::vector<std::vector<double>> coefficients;
  /// Same recursion on absolute values; measures possible cancellation.
  std::vector<std::vector<double>> scales;
  double c_lp = 0.0;
  double scale = 0.0;
  bool responds = false;
};

ResponseReport response_coefficients(const LinearizedSystem& lin, const LayerHierarchy& layers,
                                     double tol = kResponseTol);

/// Taylor coefficients a_0..a_order of every phi component by repeated
/// differentiation of the forced linear system at t = 0.
std::vector<Vector> taylor_series(const LinearizedSystem& lin, std::size_t order);
/// Coefficient of t^order in phi_target.
double taylor_oracle(const LinearizedSystem& lin, std::size_t target, std::size_t order);

struct ResponsePerturbation {
  KineticSystem system;
  Vector energy;
  std::vector<std::size_t> path;
  ResponseReport report;
  double rate_change = 0.0;  // ||K - K_bar||_inf
};

/// Lexicographically smallest shortest path from source to target.
std::vector<std::size_t> shortest_path(const SpeciesGraph& graph, std::size_t source, std::size_t target);

/// Nudges forward rates on a shortest signal-to-product path and the energies
/// of its vertices, rebuilding reverse rates from the shifted energy, until the
/// product responds at leading order. Throws SearchExhausted.
ResponsePerturbation perturb_for_response(const KineticSystem& system, const Vector& energy, std::size_t signal,
                                          std::size_t product, double delta);

}  // namespace crn
