#include "removal/independent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace removal {

SupportGraph build_support_graph(const ProductSpace& space, std::span<const PointIndex> vertices) {
  SupportGraph g;
  g.vertices.assign(vertices.begin(), vertices.end());
  std::sort(g.vertices.begin(), g.vertices.end());
  g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());
  for (PointIndex v : g.vertices) {
    if (v >= space.size()) throw DomainError("support graph vertex out of range");
  }

  const std::size_t n = g.vertices.size();
  g.neighbors.assign(n, {});
  g.loop.assign(n, false);
  // Dense membership lookup when the space is small, neighbor enumeration otherwise.
  for (std::size_t i = 0; i < n; ++i) {
    const PointIndex x = g.vertices[i];
    space.for_each_neighbor(x, [&](PointIndex y) {
      auto it = std::lower_bound(g.vertices.begin(), g.vertices.end(), y);
      if (it == g.vertices.end() || *it != y) return;
      const auto j = static_cast<std::size_t>(it - g.vertices.begin());
      if (j == i) {
        g.loop[i] = true;
      } else {
        g.neighbors[i].push_back(j);
      }
    });
  }
  return g;
}

bool is_independent(const ProductSpace& space, std::span<const PointIndex> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i; j < points.size(); ++j) {
      if (space.adjacent(points[i], points[j])) return false;
    }
  }
  return true;
}

namespace {

class Bitset {
 public:
  explicit Bitset(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
  }
  void and_not(const Bitset& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
  }
  void and_with(const Bitset& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
  }
  bool intersects(const Bitset& o) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k] & o.words_[k]) return true;
    }
    return false;
  }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w != 0) {
        const int b = std::countr_zero(w);
        fn(k * 64 + static_cast<std::size_t>(b));
        w &= w - 1;
      }
    }
  }
  std::size_t first() const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k] != 0) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
    }
    return static_cast<std::size_t>(-1);
  }

 private:
  std::vector<std::uint64_t> words_;
};

// Search over candidates relabelled 0..m-1 in decreasing-weight order, so the first member
// of every greedy clique is its heaviest.
class MwisSearch {
 public:
  MwisSearch(std::vector<double> weights, std::vector<Bitset> adjacency)
      : weights_(std::move(weights)), adj_(std::move(adjacency)), best_set_(weights_.size()) {}

  void run() {
    Bitset all(weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i) all.set(i);
    Bitset chosen(weights_.size());
    expand(all, 0.0, chosen);
  }

  double best() const { return best_; }
  const Bitset& best_set() const { return best_set_; }

 private:
  bool improves(double candidate) const {
    return candidate > best_ + 1e-13 * std::max(1.0, std::abs(best_));
  }

  double clique_cover_bound(const Bitset& cand) const {
    std::vector<Bitset> room;  // per clique: candidates adjacent to every member
    double bound = 0.0;
    cand.for_each([&](std::size_t v) {
      for (auto& r : room) {
        if (r.test(v)) {
          r.and_with(adj_[v]);
          return;
        }
      }
      room.push_back(adj_[v]);
      bound += weights_[v];
    });
    return bound;
  }

  void expand(Bitset cand, double weight, Bitset& chosen) {
    // Candidates with no neighbor among the candidates belong to every optimal extension.
    std::vector<std::size_t> forced;
    cand.for_each([&](std::size_t v) {
      if (!adj_[v].intersects(cand)) forced.push_back(v);
    });
    for (std::size_t v : forced) {
      cand.reset(v);
      chosen.set(v);
      weight += weights_[v];
    }

    if (!cand.any()) {
      if (improves(weight)) {
        best_ = weight;
        best_set_ = chosen;
      }
    } else if (improves(weight + clique_cover_bound(cand))) {
      const std::size_t v = cand.first();
      Bitset with = cand;
      with.reset(v);
      with.and_not(adj_[v]);
      chosen.set(v);
      expand(std::move(with), weight + weights_[v], chosen);
      chosen.reset(v);

      cand.reset(v);
      expand(std::move(cand), weight, chosen);
    }

    for (std::size_t v : forced) chosen.reset(v);
  }

  std::vector<double> weights_;
  std::vector<Bitset> adj_;
  double best_ = -1.0;
  Bitset best_set_;
};

}  // namespace

WeightedSet max_weight_independent_set(const SupportGraph& graph, std::span<const double> weights,
                                       std::size_t cap) {
  const std::size_t n = graph.vertices.size();
  if (weights.size() != n) throw DimensionError("MWIS: one weight per vertex required");
  if (n > cap) throw CapExceeded("MWIS vertex count", n, cap);

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (!graph.loop[i] && weights[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

  std::vector<std::size_t> local(n, static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < order.size(); ++k) local[order[k]] = k;

  std::vector<double> w(order.size());
  std::vector<Bitset> adj(order.size(), Bitset(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    w[k] = weights[order[k]];
    for (std::size_t j : graph.neighbors[order[k]]) {
      if (local[j] != static_cast<std::size_t>(-1)) adj[k].set(local[j]);
    }
  }

  WeightedSet out;
  if (order.empty()) return out;
  MwisSearch search(std::move(w), std::move(adj));
  search.run();
  search.best_set().for_each([&](std::size_t k) { out.points.push_back(graph.vertices[order[k]]); });
  std::sort(out.points.begin(), out.points.end());
  // Re-sum in ascending vertex order so the reported weight does not depend on search order.
  for (PointIndex p : out.points) {
    const auto it = std::lower_bound(graph.vertices.begin(), graph.vertices.end(), p);
    out.weight += weights[static_cast<std::size_t>(it - graph.vertices.begin())];
  }
  return out;
}

namespace {

// MWIS over the support of h with weights mu(x) h(x).
WeightedSet heaviest_independent_subset(const PointFunction& h, std::size_t cap) {
  const auto support = h.support();
  const SupportGraph graph = build_support_graph(h.space(), support);
  std::vector<double> weights(graph.vertices.size());
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    const PointIndex x = graph.vertices[i];
    weights[i] = h.space().measure(x) * h[x];
  }
  return max_weight_independent_set(graph, weights, cap);
}

}  // namespace

FarnessResult eps_far_from_independent(const PointFunction& g, double eps, std::size_t cap) {
  if (g.range() != Range::kUnit) throw DomainError("eps_far_from_independent needs a [0,1] function");
  FarnessResult r;
  r.expectation = g.expectation();
  WeightedSet best = heaviest_independent_subset(g, cap);
  r.best_captured = best.weight;
  r.uncaptured = r.expectation - r.best_captured;
  r.far = r.uncaptured > eps;
  r.witness = std::move(best.points);
  return r;
}

MatchingLikeResult matching_like_decompose(const PointFunction& g) {
  if (g.range() != Range::kUnit) throw DomainError("matching_like_decompose needs a [0,1] function");
  const ProductSpace& space = g.space();
  std::vector<double> f(space.size(), 0.0);
  std::vector<AugmentationStep> trace;

  // A loop vertex lies in no independent set, so raising f to g there keeps f matching-like.
  for (PointIndex a = 0; a < space.size(); ++a) {
    if (g[a] > 0.0 && space.adjacent(a, a)) {
      trace.push_back({a, a, space.measure(a) * g[a]});
      f[a] = g[a];
    }
  }

  // f only grows, so an edge without two-sided slack never regains it: one sweep suffices.
  for (PointIndex a = 0; a < space.size(); ++a) {
    if (!(f[a] < g[a])) continue;
    space.for_each_neighbor(a, [&](PointIndex b) {
      if (b <= a || !(f[a] < g[a]) || !(f[b] < g[b])) return;
      const double slack_a = space.measure(a) * (g[a] - f[a]);
      const double slack_b = space.measure(b) * (g[b] - f[b]);
      const double gamma = std::min(slack_a, slack_b);
      if (slack_a <= slack_b) {
        f[a] = g[a];
      } else {
        f[a] = std::min(g[a], f[a] + gamma / space.measure(a));
      }
      if (slack_b <= slack_a) {
        f[b] = g[b];
      } else {
        f[b] = std::min(g[b], f[b] + gamma / space.measure(b));
      }
      trace.push_back({a, b, gamma});
    });
  }

  std::vector<PointIndex> residual;
  for (PointIndex x = 0; x < space.size(); ++x) {
    if (f[x] < g[x]) residual.push_back(x);
  }
  return MatchingLikeResult{PointFunction(space, std::move(f), Range::kUnit), std::move(residual),
                            std::move(trace)};
}

MatchingLikeCheck is_matching_like(const PointFunction& f, std::size_t cap) {
  MatchingLikeCheck c;
  WeightedSet worst = heaviest_independent_subset(f, cap);
  c.worst_set = std::move(worst.points);
  c.worst_mass = worst.weight;
  c.half_expectation = f.expectation() / 2.0;
  c.slack = c.half_expectation - c.worst_mass;
  c.matching_like = c.worst_mass <= c.half_expectation + kMatchingLikeTolerance;
  return c;
}

}  // namespace removal
