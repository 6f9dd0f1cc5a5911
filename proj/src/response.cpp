#include "crn/response.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "crn/equilibrium.hpp"
#include "crn/error.hpp"

namespace crn {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

bool SpeciesGraph::adjacent(std::size_t a, std::size_t b) const {
  const auto& row = adjacency.at(a);
  return std::binary_search(row.begin(), row.end(), b);
}

std::vector<std::size_t> SpeciesGraph::distances(std::size_t source) const {
  std::vector<std::size_t> d(size(), kUnreached);
  std::deque<std::size_t> queue{source};
  d.at(source) = 0;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adjacency[u]) {
      if (d[v] == kUnreached) {
        d[v] = d[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return d;
}

std::vector<std::vector<std::size_t>> SpeciesGraph::components() const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(size(), false);
  for (std::size_t s = 0; s < size(); ++s) {
    if (seen[s]) continue;
    auto d = distances(s);
    std::vector<std::size_t> comp;
    for (std::size_t i = 0; i < size(); ++i) {
      if (d[i] != kUnreached) {
        comp.push_back(i);
        seen[i] = true;
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

SpeciesGraph species_graph(const ReactionNetwork& network) {
  std::vector<std::set<std::size_t>> adj(network.num_species());
  for (const auto& R : network.reactions()) {
    auto dom = R.domain();
    for (std::size_t a : dom)
      for (std::size_t b : dom)
        if (a != b) adj[a].insert(b);
  }
  SpeciesGraph g;
  for (auto& s : adj) g.adjacency.emplace_back(s.begin(), s.end());
  return g;
}

LayerHierarchy layer_hierarchy(const ReactionNetwork& network, std::size_t source, std::size_t target) {
  const auto graph = species_graph(network);
  if (source >= graph.size() || target >= graph.size()) throw InvalidParams("species index out of range");
  if (source == target) throw InvalidParams("signal and product must differ");
  const auto d = graph.distances(source);
  if (d[target] == kUnreached) {
    throw NotConnected("species '" + network.species_name(target) + "' is not connected to '" +
                       network.species_name(source) + "'");
  }
  LayerHierarchy h;
  h.source = source;
  h.target = target;
  h.depth = d[target];
  h.layers.resize(h.depth + 1);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (d[i] < h.depth) h.layers[d[i]].push_back(i);
  }
  h.layers[h.depth] = {target};

  const auto columns = canonical_half(network);
  h.links.resize(h.depth);
  for (std::size_t n = 0; n < h.depth; ++n) {
    for (std::size_t r : columns) {
      const auto& R = network.reaction(r);
      bool lo = std::any_of(h.layers[n].begin(), h.layers[n].end(), [&](std::size_t i) { return R[i] != 0; });
      bool hi = std::any_of(h.layers[n + 1].begin(), h.layers[n + 1].end(), [&](std::size_t i) { return R[i] != 0; });
      if (lo && hi) h.links[n].push_back(r);
    }
  }
  return h;
}

bool hierarchy_consistent(const ReactionNetwork& network, const LayerHierarchy& h) {
  const auto graph = species_graph(network);
  std::set<std::size_t> seen;
  for (std::size_t n = 0; n < h.layers.size(); ++n) {
    for (std::size_t i : h.layers[n]) {
      if (!seen.insert(i).second) return false;
      if (n == 0) continue;
      bool linked = std::any_of(h.layers[n - 1].begin(), h.layers[n - 1].end(),
                                [&](std::size_t j) { return graph.adjacent(i, j); });
      if (!linked) return false;
    }
  }
  std::set<std::size_t> used;
  for (const auto& links : h.links) {
    for (std::size_t r : links) {
      if (!used.insert(r).second) return false;
    }
  }
  return true;
}

LinearizedSystem linearized_matrix(const KineticSystem& system, const Vector& energy, std::size_t signal) {
  const auto& net = system.network();
  const auto N = static_cast<Eigen::Index>(net.num_species());
  if (energy.size() != N) throw InvalidParams("energy vector length does not match species count");
  LinearizedSystem lin;
  lin.A = Matrix::Zero(N, N);
  lin.signal = signal;
  lin.energy = energy;
  lin.slope = std::exp(energy(static_cast<Eigen::Index>(signal)));
  for (std::size_t r : canonical_half(net)) {
    const auto& R = net.reaction(r);
    double alpha = 0.0;  // log of prod_{i in I(R)} e^{E(i) R(i)}
    for (std::size_t i : R.initial()) alpha += energy(static_cast<Eigen::Index>(i)) * R[i];
    double weight = system.rate(r) * std::exp(alpha);
    auto dom = R.domain();
    for (std::size_t l : dom) {
      if (l == signal) continue;
      for (std::size_t j : dom) {
        lin.A(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) -=
            std::exp(energy(static_cast<Eigen::Index>(l))) * R[j] * R[l] * weight;
      }
    }
  }
  return lin;
}

ResponseReport response_coefficients(const LinearizedSystem& lin, const LayerHierarchy& layers, double tol) {
  ResponseReport rep;
  rep.depth = layers.depth;
  rep.layers = layers;
  const std::size_t L = layers.depth;
  rep.coefficients.resize(L + 1);
  rep.scales.resize(L + 1);
  rep.coefficients[0] = {lin.slope};
  rep.scales[0] = {lin.slope};

  // Path sums without the slope and factorial; absolute variant alongside.
  std::vector<double> prev{1.0}, prev_abs{1.0};
  double factorial = 1.0;
  for (std::size_t n = 1; n <= L; ++n) {
    factorial *= static_cast<double>(n + 1);
    std::vector<double> cur, cur_abs;
    for (std::size_t l : layers.layers[n]) {
      double acc = 0.0, acc_abs = 0.0;
      for (std::size_t k = 0; k < layers.layers[n - 1].size(); ++k) {
        double a = lin.A(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(layers.layers[n - 1][k]));
        acc += prev[k] * a;
        acc_abs += prev_abs[k] * std::abs(a);
      }
      cur.push_back(acc);
      cur_abs.push_back(acc_abs);
    }
    rep.coefficients[n].resize(cur.size());
    rep.scales[n].resize(cur.size());
    for (std::size_t k = 0; k < cur.size(); ++k) {
      rep.coefficients[n][k] = lin.slope * cur[k] / factorial;
      rep.scales[n][k] = lin.slope * cur_abs[k] / factorial;
    }
    prev = std::move(cur);
    prev_abs = std::move(cur_abs);
  }
  rep.c_lp = rep.coefficients[L][0];
  rep.scale = rep.scales[L][0];
  rep.responds = std::abs(rep.c_lp) > tol * rep.scale;
  return rep;
}

std::vector<Vector> taylor_series(const LinearizedSystem& lin, std::size_t order) {
  const Eigen::Index N = lin.A.rows();
  const auto s = static_cast<Eigen::Index>(lin.signal);
  Matrix inner = lin.A;
  inner.row(s).setZero();
  inner.col(s).setZero();
  Vector forcing = lin.A.col(s) * lin.slope;
  forcing(s) = 0.0;

  std::vector<Vector> a(order + 1, Vector::Zero(N));
  for (std::size_t k = 0; k < order; ++k) {
    Vector next = inner * a[k];
    if (k == 1) next += forcing;
    a[k + 1] = next / static_cast<double>(k + 1);
  }
  if (order >= 1) a[1](s) = lin.slope;
  return a;
}

double taylor_oracle(const LinearizedSystem& lin, std::size_t target, std::size_t order) {
  return taylor_series(lin, order).at(order)(static_cast<Eigen::Index>(target));
}

std::vector<std::size_t> shortest_path(const SpeciesGraph& graph, std::size_t source, std::size_t target) {
  const auto d = graph.distances(target);
  if (d.at(source) == kUnreached) throw NotConnected("no path between the species");
  std::vector<std::size_t> path{source};
  std::size_t u = source;
  while (u != target) {
    for (std::size_t v : graph.adjacency[u]) {
      if (d[v] + 1 == d[u]) {
        u = v;
        break;
      }
    }
    path.push_back(u);
  }
  return path;
}

ResponsePerturbation perturb_for_response(const KineticSystem& system, const Vector& energy, std::size_t signal,
                                          std::size_t product, double delta) {
  if (!(delta > 0.0)) throw InvalidParams("delta must be positive");
  const auto& net = system.network();
  const auto graph = species_graph(net);
  const auto path = shortest_path(graph, signal, product);
  const auto layers = layer_hierarchy(net, signal, product);
  const auto columns = canonical_half(net);

  std::vector<std::size_t> path_rx;  // positions in canonical order
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& R = net.reaction(columns[c]);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      if (R[path[k]] != 0 && R[path[k + 1]] != 0) {
        path_rx.push_back(c);
        break;
      }
    }
  }
  const std::vector<double> base_forward = forward_rates(system);

  // One grid coordinate per path reaction and per path vertex; with many
  // coordinates, reactions share one value and vertices share another.
  const std::size_t n_rx = path_rx.size();
  const std::size_t n_vx = path.size();
  const bool full = n_rx + n_vx <= 8;
  const std::size_t dims = full ? n_rx + n_vx : 2;

  for (double scale = 1.0; scale > 1e-4; scale *= 0.5) {
    const double grid[3] = {delta * scale, delta * scale / 3.0, delta * scale / 10.0};
    std::vector<int> idx(dims, 0);
    for (;;) {
      std::vector<double> forward = base_forward;
      Vector e = energy;
      for (std::size_t k = 0; k < n_rx; ++k) forward[path_rx[k]] += grid[idx[full ? k : 0]];
      for (std::size_t k = 0; k < n_vx; ++k) e(static_cast<Eigen::Index>(path[k])) += grid[idx[full ? n_rx + k : 1]];
      RateFunction rates = make_db_rates(net, e, forward);

      double change = 0.0;
      for (std::size_t r = 0; r < rates.size(); ++r) change = std::max(change, std::abs(rates[r] - system.rate(r)));
      if (change < delta) {
        KineticSystem perturbed = system.with_rates(rates);
        auto report = response_coefficients(linearized_matrix(perturbed, e, signal), layers);
        if (report.responds) return {std::move(perturbed), e, path, std::move(report), change};
      }

      std::size_t pos = 0;
      while (pos < dims && ++idx[pos] == 3) idx[pos++] = 0;
      if (pos == dims) break;
    }
  }
  throw SearchExhausted("no responding perturbation found; try a larger delta");
}

}  // namespace crn
