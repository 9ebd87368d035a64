#include "removal/functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "removal/random.hpp"

namespace removal {

const char* to_string(Range r) { return r == Range::kUnit ? "unit" : "signed"; }

CoordinateSet::CoordinateSet(std::vector<std::size_t> coords) : coords_(std::move(coords)) {
  std::sort(coords_.begin(), coords_.end());
  if (std::adjacent_find(coords_.begin(), coords_.end()) != coords_.end()) {
    throw DomainError("coordinate set has a repeated coordinate");
  }
}

CoordinateSet CoordinateSet::all(std::size_t n) {
  std::vector<std::size_t> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = i;
  return CoordinateSet(std::move(c));
}

void CoordinateSet::validate(std::size_t n) const {
  if (!coords_.empty() && coords_.back() >= n) {
    throw DomainError("coordinate " + std::to_string(coords_.back()) + " out of range for n = " +
                      std::to_string(n));
  }
}

bool CoordinateSet::contains(std::size_t c) const {
  return std::binary_search(coords_.begin(), coords_.end(), c);
}

bool CoordinateSet::is_subset_of(const CoordinateSet& other) const {
  return std::includes(other.coords_.begin(), other.coords_.end(), coords_.begin(), coords_.end());
}

bool CoordinateSet::is_disjoint_from(const CoordinateSet& other) const {
  return std::none_of(coords_.begin(), coords_.end(),
                      [&](std::size_t c) { return other.contains(c); });
}

CoordinateSet CoordinateSet::complement(std::size_t n) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!contains(i)) out.push_back(i);
  }
  return CoordinateSet(std::move(out));
}

CoordinateSet CoordinateSet::unite(const CoordinateSet& other) const {
  std::vector<std::size_t> out;
  std::set_union(coords_.begin(), coords_.end(), other.coords_.begin(), other.coords_.end(),
                 std::back_inserter(out));
  return CoordinateSet(std::move(out));
}

PointIndex project(const ProductSpace& space, PointIndex x, const CoordinateSet& coords) {
  const auto d = space.digits(x);
  PointIndex cell = 0;
  for (std::size_t c : coords) cell = cell * space.radix() + d[c];
  return cell;
}

std::vector<PointIndex> projection_table(const ProductSpace& space, const CoordinateSet& coords) {
  coords.validate(space.n());
  std::vector<PointIndex> out(space.size());
  std::vector<std::size_t> d(space.n(), 0);
  const std::size_t r = space.radix();
  for (PointIndex x = 0; x < space.size(); ++x) {
    PointIndex cell = 0;
    for (std::size_t c : coords) cell = cell * r + d[c];
    out[x] = cell;
    // Odometer increment, last coordinate fastest.
    for (std::size_t i = space.n(); i > 0; --i) {
      if (++d[i - 1] < r) break;
      d[i - 1] = 0;
    }
  }
  return out;
}

PointIndex merge(const ProductSpace& space, const CoordinateSet& coords, PointIndex cell,
                 PointIndex rest) {
  const std::size_t n = space.n();
  const std::size_t r = space.radix();
  std::vector<std::size_t> d(n, 0);
  // Fill from the least significant end of each sub-index.
  std::size_t ci = coords.size();
  for (std::size_t i = n; i > 0; --i) {
    const std::size_t pos = i - 1;
    if (ci > 0 && coords[ci - 1] == pos) {
      d[pos] = static_cast<std::size_t>(cell % r);
      cell /= r;
      --ci;
    } else {
      d[pos] = static_cast<std::size_t>(rest % r);
      rest /= r;
    }
  }
  return space.encode(d);
}

PointFunction::PointFunction(ProductSpace space, std::vector<double> values, Range range)
    : space_(std::move(space)), values_(std::move(values)), range_(range) {
  if (values_.size() != space_.size()) {
    throw DimensionError("point function has " + std::to_string(values_.size()) +
                         " values, space has " + std::to_string(space_.size()));
  }
  for (std::size_t x = 0; x < values_.size(); ++x) {
    const double v = values_[x];
    if (!std::isfinite(v)) throw DomainError("non-finite value at index " + std::to_string(x));
    if (range_ == Range::kUnit && (v < 0.0 || v > 1.0)) {
      throw DomainError("value " + std::to_string(v) + " at index " + std::to_string(x) +
                        " outside [0, 1]");
    }
  }
}

PointFunction PointFunction::constant(const ProductSpace& space, double value) {
  const Range r = (value >= 0.0 && value <= 1.0) ? Range::kUnit : Range::kSigned;
  return PointFunction(space, std::vector<double>(space.size(), value), r);
}

PointFunction PointFunction::indicator(const ProductSpace& space,
                                       std::span<const PointIndex> points) {
  std::vector<double> v(space.size(), 0.0);
  for (PointIndex x : points) {
    if (x >= space.size()) throw DomainError("indicator point out of range");
    v[x] = 1.0;
  }
  return PointFunction(space, std::move(v), Range::kUnit);
}

double PointFunction::expectation() const {
  const auto& mu = space_.measure_table();
  double acc = 0.0;
  for (std::size_t x = 0; x < values_.size(); ++x) acc += mu[x] * values_[x];
  return acc;
}

bool PointFunction::is_boolean() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

std::vector<PointIndex> PointFunction::support() const {
  std::vector<PointIndex> out;
  for (std::size_t x = 0; x < values_.size(); ++x) {
    if (values_[x] != 0.0) out.push_back(x);
  }
  return out;
}

void require_same_space(const PointFunction& f, const PointFunction& g, const char* what) {
  if (!f.space().same_as(g.space())) {
    throw DimensionError(std::string(what) + ": functions live on different spaces");
  }
}

PointFunction apply_markov(const PointFunction& f) {
  return PointFunction(f.space(), apply_markov(f.space(), f.values()), Range::kSigned);
}

double quad_form(const PointFunction& f, const PointFunction& g) {
  require_same_space(f, g, "quad_form");
  return quad_form(f.space(), f.values(), g.values());
}

double inner_product(const PointFunction& f, const PointFunction& g) {
  require_same_space(f, g, "inner_product");
  return inner_product(f.space(), f.values(), g.values());
}

PointFunction restrict(const PointFunction& f, const CoordinateSet& coords, PointIndex cell) {
  const ProductSpace& space = f.space();
  coords.validate(space.n());
  const ProductSpace cells = space.with_dimension(coords.size());
  if (cell >= cells.size()) {
    throw DomainError("cell " + std::to_string(cell) + " is not an assignment to " +
                      std::to_string(coords.size()) + " coordinates");
  }
  const ProductSpace rest_space = space.with_dimension(space.n() - coords.size());
  std::vector<double> out(rest_space.size());
  for (PointIndex rest = 0; rest < rest_space.size(); ++rest) {
    out[rest] = f[merge(space, coords, cell, rest)];
  }
  return PointFunction(rest_space, std::move(out), f.range());
}

PointFunction conditional_expectation(const PointFunction& f, const CoordinateSet& coords) {
  const ProductSpace& space = f.space();
  const auto proj = projection_table(space, coords);
  const ProductSpace cells = space.with_dimension(coords.size());
  std::vector<double> mass(cells.size(), 0.0);
  std::vector<double> weight(cells.size(), 0.0);
  const auto& mu = space.measure_table();
  for (PointIndex x = 0; x < space.size(); ++x) {
    mass[proj[x]] += mu[x] * f[x];
    weight[proj[x]] += mu[x];
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double v = mass[c] / weight[c];
    if (f.range() == Range::kUnit) v = std::clamp(v, 0.0, 1.0);
    mass[c] = v;
  }
  return PointFunction(cells, std::move(mass), f.range());
}

FourierExpansion::FourierExpansion(ProductSpace space, ChainSpectrum spectrum,
                                   std::vector<double> coefficients)
    : space_(std::move(space)), spectrum_(std::move(spectrum)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space_.size()) {
    throw DimensionError("coefficient table does not match the space");
  }
  if (static_cast<std::size_t>(spectrum_.basis.rows()) != space_.radix()) {
    throw DimensionError("spectrum does not match the space's base chain");
  }
}

std::size_t FourierExpansion::degree(PointIndex s) const {
  std::size_t deg = 0;
  for (std::size_t i = 0; i < space_.n(); ++i) {
    if (s % space_.radix() != 0) ++deg;
    s /= space_.radix();
  }
  return deg;
}

double FourierExpansion::lambda(PointIndex s) const {
  double l = 1.0;
  for (std::size_t i = 0; i < space_.n(); ++i) {
    l *= spectrum_.eigenvalues[static_cast<std::size_t>(s % space_.radix())];
    s /= space_.radix();
  }
  return l;
}

double FourierExpansion::squared_norm() const {
  double acc = 0.0;
  for (double c : coefficients_) acc += c * c;
  return acc;
}

std::vector<double> FourierExpansion::synthesize() const {
  return apply_axiswise(space_.radix(), space_.n(), spectrum_.basis, coefficients_);
}

FourierExpansion fourier_expand(const PointFunction& f, const ChainSpectrum& spectrum) {
  const ProductSpace& space = f.space();
  if (static_cast<std::size_t>(spectrum.basis.rows()) != space.radix()) {
    throw DimensionError("spectrum does not match the function's base chain");
  }
  // Analysis operator per axis: M(s, a) = mu(a) b_s(a).
  const auto r = static_cast<Eigen::Index>(space.radix());
  Matrix analysis(r, r);
  for (Eigen::Index s = 0; s < r; ++s) {
    for (Eigen::Index a = 0; a < r; ++a) {
      analysis(s, a) = space.base().stationary()(a) * spectrum.basis(a, s);
    }
  }
  auto coeffs = apply_axiswise(space.radix(), space.n(), analysis, f.values());
  return FourierExpansion(space, spectrum, std::move(coeffs));
}

FourierExpansion fourier_expand(const PointFunction& f) {
  return fourier_expand(f, eigendecompose(f.space().base()));
}

PointFunction noise_operator(const PointFunction& f, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("noise rate eta must lie in [0, 1]");
  if (eta == 1.0) return f;
  FourierExpansion exp = fourier_expand(f);
  std::vector<double> scaled(exp.coefficients().begin(), exp.coefficients().end());
  for (PointIndex s = 0; s < scaled.size(); ++s) {
    scaled[s] *= std::pow(eta, static_cast<double>(exp.degree(s)));
  }
  FourierExpansion noisy(exp.space(), exp.spectrum(), std::move(scaled));
  auto values = noisy.synthesize();
  if (f.range() == Range::kUnit) {
    // N_eta is a Markov operator; only rounding can leave [0, 1].
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  }
  return PointFunction(f.space(), std::move(values), f.range());
}

std::vector<double> influences(const FourierExpansion& expansion) {
  const ProductSpace& space = expansion.space();
  std::vector<double> inf(space.n(), 0.0);
  std::vector<std::size_t> d(space.n());
  for (PointIndex s = 0; s < space.size(); ++s) {
    const double c = expansion[s];
    if (c == 0.0) continue;
    space.decode(s, d);
    for (std::size_t i = 0; i < space.n(); ++i) {
      if (d[i] != 0) inf[i] += c * c;
    }
  }
  return inf;
}

std::vector<double> influences(const PointFunction& f) { return influences(fourier_expand(f)); }

double influence(const PointFunction& f, std::size_t coordinate) {
  if (coordinate >= f.space().n()) {
    throw DomainError("coordinate " + std::to_string(coordinate) + " out of range");
  }
  return influences(f)[coordinate];
}

PointFunction randomized_booleanize(const PointFunction& f, std::size_t m, std::uint64_t seed) {
  if (f.range() != Range::kUnit) throw DomainError("randomized_booleanize needs a [0,1] function");
  const ProductSpace& space = f.space();
  const ProductSpace lifted = space.with_dimension(space.n() + m);
  const std::size_t fiber = lifted.size() / space.size();
  Rng rng(seed);
  std::vector<double> out(lifted.size());
  for (PointIndex x = 0; x < space.size(); ++x) {
    for (std::size_t y = 0; y < fiber; ++y) {
      out[x * fiber + y] = rng.bernoulli(f[x]) ? 1.0 : 0.0;
    }
  }
  return PointFunction(lifted, std::move(out), Range::kUnit);
}

}  // namespace removal
