#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "removal/functions.hpp"

namespace removal {

inline constexpr std::size_t kDefaultMwisCap = 2000;

// Graph on a vertex subset of V^n; x ~ y iff A^{(x)n}(x, y) > 0. Decided purely from the
// base chain's sparsity pattern.
struct SupportGraph {
  std::vector<PointIndex> vertices;                // ascending
  std::vector<std::vector<std::size_t>> neighbors;  // local indices, self excluded, ascending
  std::vector<bool> loop;                           // A^{(x)n}(x, x) > 0
};

SupportGraph build_support_graph(const ProductSpace& space, std::span<const PointIndex> vertices);

// True iff no pair (x, y) of U x U, x == y included, is a positive-probability transition.
bool is_independent(const ProductSpace& space, std::span<const PointIndex> points);

struct WeightedSet {
  std::vector<PointIndex> points;  // ascending
  double weight = 0.0;
};

// Exact maximum-weight independent set by branch and bound (greedy clique-cover bound).
// Loop vertices and vertices of nonpositive weight are excluded up front. Deterministic:
// among optimal sets the first one met by the fixed branching order is returned.
// `weights` is indexed like graph.vertices. Throws CapExceeded above `cap` vertices.
WeightedSet max_weight_independent_set(const SupportGraph& graph, std::span<const double> weights,
                                       std::size_t cap = kDefaultMwisCap);

struct FarnessResult {
  bool far = false;
  double expectation = 0.0;       // E[g]
  double best_captured = 0.0;     // max over independent U of E[1_U g]
  double uncaptured = 0.0;        // E[g] - best_captured
  std::vector<PointIndex> witness;  // an argmax U
};

// g is eps-far from independent iff E[g] - max_U E[1_U g] > eps.
FarnessResult eps_far_from_independent(const PointFunction& g, double eps,
                                       std::size_t cap = kDefaultMwisCap);

struct AugmentationStep {
  PointIndex a = 0;
  PointIndex b = 0;  // a == b marks saturation of a loop vertex
  double gamma = 0.0;
};

struct MatchingLikeResult {
  PointFunction f;
  std::vector<PointIndex> residual_set;  // {x : f(x) < g(x)}
  std::vector<AugmentationStep> trace;
};

// Greedy augmentation along edges in canonical order. Output satisfies f <= g exactly,
// an independent residual set, and E[1_W f] <= E[f] / 2 for every independent W.
MatchingLikeResult matching_like_decompose(const PointFunction& g);

inline constexpr double kMatchingLikeTolerance = 1e-12;

struct MatchingLikeCheck {
  bool matching_like = false;
  std::vector<PointIndex> worst_set;  // independent set of maximum f-mass
  double worst_mass = 0.0;
  double half_expectation = 0.0;
  double slack = 0.0;  // half_expectation - worst_mass
};

MatchingLikeCheck is_matching_like(const PointFunction& f, std::size_t cap = kDefaultMwisCap);

}  // namespace removal
