#pragma once

// Slow reference implementations. Each one takes a different route from the library code it
// checks: explicit kernels instead of axis-wise application, variances instead of Fourier
// mass, exhaustive enumeration instead of search.

#include <cstddef>
#include <span>
#include <vector>

#include "removal/functions.hpp"
#include "removal/independent.hpp"
#include "removal/kneser.hpp"
#include "removal/random.hpp"

namespace removal::verify {

// A^{(x)n}(x, y) from per-coordinate entries.
double kernel_entry(const ProductSpace& space, PointIndex x, PointIndex y);

// sum_x sum_y mu(x) A^{(x)n}(x, y) f(x) g(y) over all |V|^{2n} pairs.
double quad_form_double_sum(const ProductSpace& space, std::span<const double> f,
                            std::span<const double> g);

// The same double sum for many pairs at once (one kernel evaluation per (x, y)).
std::vector<double> quad_form_double_sum_batch(const ProductSpace& space,
                                               const std::vector<std::vector<double>>& fs,
                                               const std::vector<std::vector<double>>& gs);

// E over the other coordinates of the variance along coordinate i.
double influence_by_variance(const PointFunction& f, std::size_t coordinate);

// Direct summation with digit-level projection.
std::vector<double> conditional_expectation_direct(const PointFunction& f, const CoordinateSet& coords);

// N_eta on one coordinate is eta I + (1 - eta) 1 mu^T; applied by explicit n-fold sums.
std::vector<double> noise_direct(const PointFunction& f, double eta);

// Exhaustive MWIS for at most 24 vertices; ties go to the smallest bitmask.
WeightedSet mwis_exhaustive(const SupportGraph& graph, std::span<const double> weights);

// Sum over all ordered pairs of subsets, disjointness tested explicitly.
double edge_cube_pairs(const PointFunction& g, double p);

// Ordered disjoint pairs of k-subsets built as element lists.
double edge_layer_pairs(const LayerFunction& f);

// edge_cube(1_{|x| >= k}) by the multinomial count of (|x|, |y|).
double c_constant_closed_form(double p, std::size_t n);

// sum over x containing x' (outside J) of mu_p(w, x) C(n,k) / C(|x| + |w|, k) by enumeration.
double down_inner_sum_direct(std::size_t n, std::size_t k, double p, std::size_t j_size,
                             std::size_t w_size);

// Lifted value at one point by listing the k-subsets of x.
double up_lift_at(const LayerFunction& f, SubsetMask x);

// Random functions used by the suites.
std::vector<double> random_values(std::size_t size, Rng& rng, double zero_probability = 0.0);
PointFunction random_unit_function(const ProductSpace& space, Rng& rng, double zero_probability = 0.0);
LayerFunction random_layer_function(std::size_t n, std::size_t k, Rng& rng);

}  // namespace removal::verify
