#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "removal/functions.hpp"
#include "removal/junta.hpp"

namespace removal {

// Subsets of [n] are bitmasks, bit i = element i. On {0,1}^n element i is coordinate i,
// so element 0 is the most significant digit of the point index.
using SubsetMask = std::uint64_t;

inline constexpr std::size_t kMaxKneserN = 62;

// [[(1-2p)/(1-p), p/(1-p)], [1, 0]]; requires 0 < p < 1/2.
BaseChain disjointness_chain(double p);

// {0,1}^n over the disjointness chain for p.
ProductSpace disjointness_space(double p, std::size_t n,
                                std::size_t point_cap = ProductSpace::kDefaultPointCap);

PointIndex mask_to_point(std::size_t n, SubsetMask mask);
SubsetMask point_to_mask(std::size_t n, PointIndex point);

// p^|x| p^|y| (1-2p)^(n-|x|-|y|) for disjoint x, y; 0 otherwise.
double mu_pp(std::size_t n, double p, SubsetMask x, SubsetMask y);

// Sum over ordered disjoint pairs of g(x) g(y) mu_pp(x, y); O(3^n).
// g must live on disjointness_space(p, n); throws DomainError if the chain does not match p.
double edge_cube(const PointFunction& g, double p);

double binomial(std::size_t n, std::size_t k);

// Combinatorial number system: rank(c_1 < ... < c_k) = sum_i C(c_i, i).
std::uint64_t subset_rank(SubsetMask mask);
SubsetMask subset_unrank(std::size_t k, std::uint64_t rank);

// Dense table over the k-subsets of [n] in rank order, values in [0, 1].
class LayerFunction {
 public:
  LayerFunction(std::size_t n, std::size_t k, std::vector<double> values);

  static LayerFunction constant(std::size_t n, std::size_t k, double value);
  // 1 on k-sets containing `element`.
  static LayerFunction star(std::size_t n, std::size_t k, std::size_t element);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::uint64_t rank) const { return values_[rank]; }
  double at(SubsetMask mask) const { return values_[subset_rank(mask)]; }
  // k-subsets in rank order.
  const std::vector<SubsetMask>& masks() const noexcept { return *masks_; }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> values_;
  std::shared_ptr<const std::vector<SubsetMask>> masks_;
};

struct LayerEdge {
  double ordered = 0.0;    // sum over ordered disjoint pairs / (C(n,k) C(n-k,k))
  double unordered = 0.0;  // sum over unordered pairs, same normalizer (ordered / 2)
};

LayerEdge edge_layer(const LayerFunction& f);

// Requires k = p n.
void require_layer_ratio(std::size_t n, std::size_t k, double p);

// g(x) = C(|x|, k)^-1 sum_{x' subset of x, |x'| = k} f(x') for |x| >= k, else 0.
PointFunction up_lift(const LayerFunction& f, double p);

// edge_cube of the lift of the all-ones layer function.
double c_constant(double p, std::size_t n);

struct DownRatio {
  PointIndex w = 0;       // cell of {0,1}^J
  std::size_t weight = 0;  // |w|
  double v_f = 0.0;       // sum over x of size k - |w| of f(w, x) / C(n,k)
  double v_g = 0.0;       // sum over x of g(w, x) mu_p(w, x)
  double ratio = 0.0;     // v_f / v_g (0 when v_f = 0)
  double inner_sum = 0.0;  // closed-form lower bound factor: v_g >= inner_sum * v_f
  bool inner_ok = false;   // inner_sum >= 1/5
  bool bound_ok = false;   // v_f <= 5 v_g (+1e-12)
};

// Closed-form inner sum for given n, k, |J|, |w|.
double down_inner_sum(std::size_t n, std::size_t k, double p, std::size_t j_size, std::size_t w_size);

// All w in {0,1}^J at once. g must be up_lift(f, p).
std::vector<DownRatio> down_ratios(const LayerFunction& f, const PointFunction& g,
                                   const CoordinateSet& coords, double p);

DownRatio down_ratio(const LayerFunction& f, const PointFunction& g, const CoordinateSet& coords,
                     PointIndex w, double p);

// True iff no two members (a member with itself included) are disjoint.
bool is_intersecting(std::span<const SubsetMask> family);

// Cells of {0,1}^J (coordinate order of J) to masks over positions 0..|J|-1.
std::vector<SubsetMask> cells_to_masks(std::size_t j_size, std::span<const PointIndex> cells);

struct KneserCapture {
  CoordinateSet coords;                 // J, as elements of [n]
  std::vector<SubsetMask> family;       // T over positions of J, ascending
  std::vector<PointIndex> cells;        // T as cells of {0,1}^J
  bool intersecting = false;
  double loss = 0.0;             // C(n,k)^-1 sum over x with (x cap J) not in T of f(x)
  double loss_bound = 0.0;       // 5 eps
  bool loss_ok = false;
  double cube_loss = 0.0;        // loss of g on the cube, from the independent capture
  LayerEdge edge;                // of f
  double edge_lifted = 0.0;      // edge_cube(g)
  IndependentCapture capture;
};

// Lift, capture on the cube, and read the capture back on the layer. A non-intersecting T
// throws InvariantViolation.
KneserCapture kneser_capture(const LayerFunction& f, double eps, double p, const CaptureParams& params,
                             std::size_t mwis_cap = kDefaultMwisCap);

}  // namespace removal
