#include "crn/conservation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "crn/error.hpp"

namespace crn {

StoichMatrix stoich_matrix(const ReactionNetwork& network) {
  StoichMatrix out;
  out.columns = canonical_half(network);
  out.matrix = RationalMatrix(network.num_species(), out.columns.size());
  for (std::size_t c = 0; c < out.columns.size(); ++c) {
    const auto& R = network.reaction(out.columns[c]);
    for (std::size_t i = 0; i < network.num_species(); ++i) out.matrix(i, c) = R[i];
  }
  return out;
}

std::vector<RationalVector> conservation_space(const ReactionNetwork& network) {
  return nullspace(stoich_matrix(network).matrix.transpose());
}

std::vector<RationalVector> cycle_space(const ReactionNetwork& network) {
  return nullspace(stoich_matrix(network).matrix);
}

ConservationBasis::ConservationBasis(std::size_t num_species,
                                     std::vector<std::vector<std::int64_t>> rays)
    : num_species_(num_species), rays_(std::move(rays)) {
  for (const auto& r : rays_) {
    if (r.size() != num_species_) throw std::invalid_argument("ConservationBasis: ray length");
  }
}

Matrix ConservationBasis::matrix() const {
  Matrix m(static_cast<Eigen::Index>(rays_.size()), static_cast<Eigen::Index>(num_species_));
  for (std::size_t k = 0; k < rays_.size(); ++k)
    for (std::size_t i = 0; i < num_species_; ++i)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = static_cast<double>(rays_[k][i]);
  return m;
}

std::vector<std::int64_t> ConservationBasis::per_species(std::size_t i) const {
  std::vector<std::int64_t> v(rays_.size());
  for (std::size_t k = 0; k < rays_.size(); ++k) v[k] = rays_[k].at(i);
  return v;
}

bool ConservationBasis::independent() const {
  std::vector<RationalVector> rows;
  for (const auto& r : rays_) rows.push_back(to_rational(r));
  return rank(RationalMatrix::from_rows(rows, num_species_)) == rays_.size();
}

bool ConservationBasis::touches(std::size_t i) const {
  return std::any_of(rays_.begin(), rays_.end(), [i](const auto& r) { return r.at(i) > 0; });
}

namespace {

using IntRay = std::vector<Integer>;

std::vector<bool> zero_set(const IntRay& r) {
  std::vector<bool> z(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = sgn(r[i]) == 0;
  return z;
}

bool contains(const std::vector<bool>& super, const std::vector<bool>& sub) {
  for (std::size_t i = 0; i < sub.size(); ++i) {
    if (sub[i] && !super[i]) return false;
  }
  return true;
}

}  // namespace

ConservationBasis extreme_rays(const ReactionNetwork& network) {
  const std::size_t n = network.num_species();
  std::vector<IntRay> rays;
  for (std::size_t i = 0; i < n; ++i) {
    IntRay e(n, Integer(0));
    e[i] = 1;
    rays.push_back(std::move(e));
  }

  for (std::size_t r : canonical_half(network)) {
    const auto& R = network.reaction(r);
    std::vector<Integer> value(rays.size());
    for (std::size_t k = 0; k < rays.size(); ++k) {
      Integer acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (R[i] != 0) acc += rays[k][i] * R[i];
      }
      value[k] = acc;
    }

    std::vector<std::vector<bool>> zeros(rays.size());
    for (std::size_t k = 0; k < rays.size(); ++k) zeros[k] = zero_set(rays[k]);

    std::vector<IntRay> next;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      if (sgn(value[k]) == 0) next.push_back(rays[k]);
    }
    for (std::size_t p = 0; p < rays.size(); ++p) {
      if (sgn(value[p]) <= 0) continue;
      for (std::size_t q = 0; q < rays.size(); ++q) {
        if (sgn(value[q]) >= 0) continue;
        std::vector<bool> common(n);
        for (std::size_t i = 0; i < n; ++i) common[i] = zeros[p][i] && zeros[q][i];
        bool adjacent = true;
        for (std::size_t k = 0; k < rays.size() && adjacent; ++k) {
          if (k != p && k != q && contains(zeros[k], common)) adjacent = false;
        }
        if (!adjacent) continue;
        IntRay combo(n);
        for (std::size_t i = 0; i < n; ++i) combo[i] = value[p] * rays[q][i] - value[q] * rays[p][i];
        next.push_back(primitive(std::move(combo)));
      }
    }
    rays = std::move(next);
  }

  std::vector<std::vector<std::int64_t>> out;
  for (const auto& ray : rays) {
    std::vector<std::int64_t> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!ray[i].fits_slong_p()) throw Error("extreme ray entry exceeds 64-bit range");
      v[i] = ray[i].get_si();
    }
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return ConservationBasis(n, std::move(out));
}

bool is_conservative(const ConservationBasis& basis) {
  for (std::size_t i = 0; i < basis.num_species(); ++i) {
    if (!basis.touches(i)) return false;
  }
  return basis.num_species() > 0;
}

bool is_conservative(const ReactionNetwork& network) { return is_conservative(extreme_rays(network)); }

MConnectivity m_connectivity(const ConservationBasis& basis) {
  const std::size_t n = basis.num_species();
  std::vector<std::vector<std::int64_t>> per(n);
  for (std::size_t i = 0; i < n; ++i) per[i] = basis.per_species(i);

  MConnectivity out;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  bool any_zero_vector = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::int64_t dot = 0;
      for (std::size_t k = 0; k < basis.size(); ++k) dot += per[i][k] * per[j][k];
      if (dot == 0) {
        out.failing_pairs.emplace_back(i, j);
        if (i == j) any_zero_vector = true;
      } else if (i != j) {
        parent[find(i)] = find(j);
      }
    }
  }

  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  for (auto& g : groups) {
    if (!g.empty()) out.components.push_back(std::move(g));
  }
  std::sort(out.components.begin(), out.components.end());

  out.pairwise = out.failing_pairs.empty();
  out.connected = out.components.size() == 1 && !any_zero_vector;
  return out;
}

ConservationReport analyze_conservation(const ReactionNetwork& network) {
  ConservationReport out;
  out.space = conservation_space(network);
  out.cycles = cycle_space(network);
  out.dim = out.space.size();
  out.cycle_dim = out.cycles.size();
  out.rays = extreme_rays(network);
  out.conservative = is_conservative(out.rays);
  out.connectivity = m_connectivity(out.rays);
  return out;
}

}  // namespace crn
