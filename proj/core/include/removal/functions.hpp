#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "removal/chain.hpp"

namespace removal {

enum class Range { kUnit, kSigned };

const char* to_string(Range r);

// Sorted set of distinct coordinates of [n] (0-based).
class CoordinateSet {
 public:
  CoordinateSet() = default;
  // Sorts the input; throws DomainError on repeats.
  explicit CoordinateSet(std::vector<std::size_t> coords);
  CoordinateSet(std::initializer_list<std::size_t> coords)
      : CoordinateSet(std::vector<std::size_t>(coords)) {}

  static CoordinateSet all(std::size_t n);

  // Throws DomainError if any coordinate is >= n.
  void validate(std::size_t n) const;

  std::size_t size() const noexcept { return coords_.size(); }
  bool empty() const noexcept { return coords_.empty(); }
  std::size_t operator[](std::size_t i) const { return coords_[i]; }
  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }
  const std::vector<std::size_t>& items() const noexcept { return coords_; }

  bool contains(std::size_t c) const;
  bool is_subset_of(const CoordinateSet& other) const;
  bool is_disjoint_from(const CoordinateSet& other) const;
  CoordinateSet complement(std::size_t n) const;
  CoordinateSet unite(const CoordinateSet& other) const;

  friend bool operator==(const CoordinateSet&, const CoordinateSet&) = default;
  friend auto operator<=>(const CoordinateSet& a, const CoordinateSet& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.coords_ <=> b.coords_;
  }

 private:
  std::vector<std::size_t> coords_;
};

// Index of the projection of x onto the coordinates I, as a point of V^{|I|}.
PointIndex project(const ProductSpace& space, PointIndex x, const CoordinateSet& coords);

// project() for every point of the space.
std::vector<PointIndex> projection_table(const ProductSpace& space, const CoordinateSet& coords);

// The point of V^n whose coordinates in I are given by `cell` and whose remaining
// coordinates (in increasing order) are given by `rest`.
PointIndex merge(const ProductSpace& space, const CoordinateSet& coords, PointIndex cell,
                 PointIndex rest);

// Dense table over V^n. A unit-range function has every value in [0, 1], checked exactly.
class PointFunction {
 public:
  PointFunction(ProductSpace space, std::vector<double> values, Range range = Range::kUnit);

  static PointFunction constant(const ProductSpace& space, double value);
  static PointFunction indicator(const ProductSpace& space, std::span<const PointIndex> points);

  const ProductSpace& space() const noexcept { return space_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](PointIndex x) const { return values_[x]; }
  Range range() const noexcept { return range_; }

  double expectation() const;
  bool is_boolean() const;
  std::vector<PointIndex> support() const;

 private:
  ProductSpace space_;
  std::vector<double> values_;
  Range range_;
};

// Throws DimensionError unless both functions live on the same space.
void require_same_space(const PointFunction& f, const PointFunction& g, const char* what);

PointFunction apply_markov(const PointFunction& f);
double quad_form(const PointFunction& f, const PointFunction& g);
double inner_product(const PointFunction& f, const PointFunction& g);

// f(x, .) on V^{[n] \ I}, coordinates kept in increasing order.
PointFunction restrict(const PointFunction& f, const CoordinateSet& coords, PointIndex cell);

// Table over V^I of E[f(x, .)], returned as a function on V^{|I|}.
PointFunction conditional_expectation(const PointFunction& f, const CoordinateSet& coords);

// Coefficients against the product eigenbasis chi_S(x) = prod_i b_{S_i}(x_i).
// Multi-indices S share the points' mixed-radix order; S_i = 0 is the constant character.
class FourierExpansion {
 public:
  FourierExpansion(ProductSpace space, ChainSpectrum spectrum, std::vector<double> coefficients);

  const ProductSpace& space() const noexcept { return space_; }
  const ChainSpectrum& spectrum() const noexcept { return spectrum_; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  double operator[](PointIndex s) const { return coefficients_[s]; }

  std::size_t degree(PointIndex s) const;
  double lambda(PointIndex s) const;
  double squared_norm() const;

  std::vector<double> synthesize() const;

 private:
  ProductSpace space_;
  ChainSpectrum spectrum_;
  std::vector<double> coefficients_;
};

FourierExpansion fourier_expand(const PointFunction& f, const ChainSpectrum& spectrum);
FourierExpansion fourier_expand(const PointFunction& f);

// Scales the degree-|S| coefficient by eta^|S|. Mean preserving; maps [0,1] into [0,1].
PointFunction noise_operator(const PointFunction& f, double eta);

// sum over S with S_i != 0 of fhat(S)^2.
double influence(const PointFunction& f, std::size_t coordinate);
std::vector<double> influences(const PointFunction& f);
std::vector<double> influences(const FourierExpansion& expansion);

// f'(x, y) = 1 with probability f(x), independently for every (x, y) in V^n x V^m.
// The m extra coordinates are the least significant ones.
PointFunction randomized_booleanize(const PointFunction& f, std::size_t m, std::uint64_t seed);

}  // namespace removal
