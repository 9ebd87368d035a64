#include "removal/verify/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>

namespace removal::verify {

double kernel_entry(const ProductSpace& space, PointIndex x, PointIndex y) {
  const Matrix& a = space.base().transition();
  const std::vector<std::size_t> xd = space.digits(x);
  const std::vector<std::size_t> yd = space.digits(y);
  double k = 1.0;
  for (std::size_t i = 0; i < space.n(); ++i) k *= a(static_cast<Eigen::Index>(xd[i]), static_cast<Eigen::Index>(yd[i]));
  return k;
}

double quad_form_double_sum(const ProductSpace& space, std::span<const double> f,
                            std::span<const double> g) {
  double s = 0.0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    for (PointIndex y = 0; y < space.size(); ++y) {
      s += space.measure(x) * kernel_entry(space, x, y) * f[x] * g[y];
    }
  }
  return s;
}

std::vector<double> quad_form_double_sum_batch(const ProductSpace& space,
                                               const std::vector<std::vector<double>>& fs,
                                               const std::vector<std::vector<double>>& gs) {
  const std::size_t m = fs.size();
  if (gs.size() != m) throw DimensionError("batch double sum: unequal pair lists");
  const Matrix& a = space.base().transition();
  const std::size_t n = space.n();
  std::vector<double> out(m, 0.0);
  std::vector<std::vector<std::size_t>> digits(space.size());
  for (PointIndex x = 0; x < space.size(); ++x) digits[x] = space.digits(x);
  for (PointIndex x = 0; x < space.size(); ++x) {
    for (PointIndex y = 0; y < space.size(); ++y) {
      double k = space.measure(x);
      for (std::size_t i = 0; i < n && k != 0.0; ++i) {
        k *= a(static_cast<Eigen::Index>(digits[x][i]), static_cast<Eigen::Index>(digits[y][i]));
      }
      if (k == 0.0) continue;
      for (std::size_t t = 0; t < m; ++t) out[t] += k * fs[t][x] * gs[t][y];
    }
  }
  return out;
}

double influence_by_variance(const PointFunction& f, std::size_t coordinate) {
  const ProductSpace& space = f.space();
  if (coordinate >= space.n()) throw DomainError("influence: coordinate out of range");
  const Vector& mu = space.base().stationary();
  const std::size_t r = space.radix();
  double total = 0.0;
  for (PointIndex x = 0; x < space.size(); ++x) {
    std::vector<std::size_t> d = space.digits(x);
    if (d[coordinate] != 0) continue;
    double weight = 1.0;
    for (std::size_t j = 0; j < space.n(); ++j) {
      if (j != coordinate) weight *= mu(static_cast<Eigen::Index>(d[j]));
    }
    std::vector<double> fiber(r);
    double mean = 0.0;
    for (std::size_t a = 0; a < r; ++a) {
      d[coordinate] = a;
      fiber[a] = f[space.encode(d)];
      mean += mu(static_cast<Eigen::Index>(a)) * fiber[a];
    }
    double var = 0.0;
    for (std::size_t a = 0; a < r; ++a) {
      var += mu(static_cast<Eigen::Index>(a)) * (fiber[a] - mean) * (fiber[a] - mean);
    }
    total += weight * var;
  }
  return total;
}

std::vector<double> conditional_expectation_direct(const PointFunction& f, const CoordinateSet& coords) {
  const ProductSpace& space = f.space();
  const std::size_t r = space.radix();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) cells *= r;
  std::vector<double> mass(cells, 0.0);
  std::vector<double> weight(cells, 0.0);
  for (PointIndex x = 0; x < space.size(); ++x) {
    const std::vector<std::size_t> d = space.digits(x);
    std::size_t cell = 0;
    for (std::size_t c : coords) cell = cell * r + d[c];
    mass[cell] += space.measure(x) * f[x];
    weight[cell] += space.measure(x);
  }
  for (std::size_t c = 0; c < cells; ++c) mass[c] /= weight[c];
  return mass;
}

std::vector<double> noise_direct(const PointFunction& f, double eta) {
  const ProductSpace& space = f.space();
  const Vector& mu = space.base().stationary();
  std::vector<double> out(space.size(), 0.0);
  for (PointIndex x = 0; x < space.size(); ++x) {
    const std::vector<std::size_t> xd = space.digits(x);
    for (PointIndex y = 0; y < space.size(); ++y) {
      const std::vector<std::size_t> yd = space.digits(y);
      double k = 1.0;
      for (std::size_t i = 0; i < space.n(); ++i) {
        k *= (xd[i] == yd[i] ? eta : 0.0) + (1.0 - eta) * mu(static_cast<Eigen::Index>(yd[i]));
      }
      out[x] += k * f[y];
    }
  }
  return out;
}

WeightedSet mwis_exhaustive(const SupportGraph& graph, std::span<const double> weights) {
  const std::size_t m = graph.vertices.size();
  if (m > 24) throw CapExceeded("exhaustive MWIS vertices", m, 24);
  std::vector<std::uint32_t> adj(m, 0);
  for (std::size_t v = 0; v < m; ++v) {
    for (std::size_t u : graph.neighbors[v]) adj[v] |= std::uint32_t{1} << u;
  }
  double best = -1.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
    bool ok = true;
    double w = 0.0;
    for (std::size_t v = 0; v < m && ok; ++v) {
      if (!((mask >> v) & 1U)) continue;
      if (graph.loop[v] || (adj[v] & mask) != 0) ok = false;
      w += weights[v];
    }
    if (ok && w > best) {
      best = w;
      best_mask = mask;
    }
  }
  WeightedSet out;
  for (std::size_t v = 0; v < m; ++v) {
    if ((best_mask >> v) & 1U) {
      out.points.push_back(graph.vertices[v]);
      out.weight += weights[v];
    }
  }
  return out;
}

double edge_cube_pairs(const PointFunction& g, double p) {
  const std::size_t n = g.space().n();
  const SubsetMask count = SubsetMask{1} << n;
  double s = 0.0;
  for (SubsetMask x = 0; x < count; ++x) {
    for (SubsetMask y = 0; y < count; ++y) {
      if ((x & y) != 0) continue;
      const int a = std::popcount(x);
      const int b = std::popcount(y);
      const double w = std::pow(p, a) * std::pow(p, b) * std::pow(1.0 - 2.0 * p, static_cast<int>(n) - a - b);
      s += g[mask_to_point(n, x)] * g[mask_to_point(n, y)] * w;
    }
  }
  return s;
}

namespace {

double choose(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

void k_subsets(std::size_t n, std::size_t k, std::vector<std::size_t>& cur, std::size_t from,
               std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t e = from; e < n; ++e) {
    cur.push_back(e);
    k_subsets(n, k, cur, e + 1, out);
    cur.pop_back();
  }
}

std::size_t rank_of(const std::vector<std::size_t>& elems) {
  double r = 0.0;
  for (std::size_t i = 0; i < elems.size(); ++i) r += choose(elems[i], i + 1);
  return static_cast<std::size_t>(r);
}

}  // namespace

double edge_layer_pairs(const LayerFunction& f) {
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> cur;
  k_subsets(f.n(), f.k(), cur, 0, sets);
  std::vector<double> val(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) val[i] = f[rank_of(sets[i])];
  double s = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < sets.size(); ++j) {
      std::vector<std::size_t> common;
      std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                            std::back_inserter(common));
      if (common.empty()) s += val[i] * val[j];
    }
  }
  return s / (choose(f.n(), f.k()) * choose(f.n() - f.k(), f.k()));
}

double c_constant_closed_form(double p, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
  double s = 0.0;
  for (std::size_t a = k; a <= n; ++a) {
    for (std::size_t b = k; a + b <= n; ++b) {
      const double pairs = choose(n, a) * choose(n - a, b);
      s += pairs * std::pow(p, static_cast<double>(a + b)) *
           std::pow(1.0 - 2.0 * p, static_cast<double>(n - a - b));
    }
  }
  return s;
}

double down_inner_sum_direct(std::size_t n, std::size_t k, double p, std::size_t j_size,
                             std::size_t w_size) {
  const std::size_t m = n - j_size;  // elements outside J
  const std::size_t fixed = k - w_size;  // |x'|
  const std::size_t free = m - fixed;
  double s = 0.0;
  for (std::uint64_t extra = 0; extra < (std::uint64_t{1} << free); ++extra) {
    const std::size_t size = fixed + static_cast<std::size_t>(std::popcount(extra)) + w_size;
    const double mu = std::pow(p, static_cast<double>(size)) * std::pow(1.0 - p, static_cast<double>(n - size));
    s += mu * choose(n, k) / choose(size, k);
  }
  return s;
}

double up_lift_at(const LayerFunction& f, SubsetMask x) {
  std::vector<std::size_t> elems;
  for (std::size_t e = 0; e < f.n(); ++e) {
    if ((x >> e) & 1U) elems.push_back(e);
  }
  if (elems.size() < f.k()) return 0.0;
  std::vector<std::vector<std::size_t>> picks;
  std::vector<std::size_t> cur;
  k_subsets(elems.size(), f.k(), cur, 0, picks);
  double s = 0.0;
  for (const auto& pick : picks) {
    std::vector<std::size_t> chosen;
    for (std::size_t i : pick) chosen.push_back(elems[i]);
    s += f[rank_of(chosen)];
  }
  return s / static_cast<double>(picks.size());
}

std::vector<double> random_values(std::size_t size, Rng& rng, double zero_probability) {
  std::vector<double> v(size);
  for (double& x : v) {
    x = rng.uniform01();
    if (zero_probability > 0.0 && rng.bernoulli(zero_probability)) x = 0.0;
  }
  return v;
}

PointFunction random_unit_function(const ProductSpace& space, Rng& rng, double zero_probability) {
  return PointFunction(space, random_values(space.size(), rng, zero_probability), Range::kUnit);
}

LayerFunction random_layer_function(std::size_t n, std::size_t k, Rng& rng) {
  return LayerFunction(n, k, random_values(static_cast<std::size_t>(choose(n, k)), rng));
}

}  // namespace removal::verify
