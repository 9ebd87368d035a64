#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "removal/error.hpp"

namespace removal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Canonical index of a point of V^n: mixed radix, coordinate 0 most significant.
using PointIndex = std::uint64_t;

enum class ChainViolation {
  kTooFewStates,
  kNotSquare,
  kNegativeEntry,
  kNotRowStochastic,
  kReducible,
  kPeriodic,
  kNotReversible,
};

const char* to_string(ChainViolation v);

// Raised by validate_chain. The witness pair names the offending states
// (for a row-sum failure both entries are the row).
class ChainError : public DomainError {
 public:
  ChainError(ChainViolation kind, std::size_t first, std::size_t second, const std::string& detail);

  ChainViolation kind() const noexcept { return kind_; }
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  ChainViolation kind_;
  std::size_t first_;
  std::size_t second_;
};

// A validated reversible, irreducible, aperiodic chain on a small state set.
// Only validate_chain() builds one, so every instance satisfies those properties.
class BaseChain {
 public:
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Matrix& transition() const noexcept { return transition_; }
  const Vector& stationary() const noexcept { return stationary_; }

  // Minimum positive mu(x) A(x, y) over ordered pairs of states.
  double w_min() const noexcept { return w_min_; }

  // Support pattern of the transition matrix; exact, no tolerance.
  bool has_edge(std::size_t x, std::size_t y) const { return support_[x * size() + y] != 0; }
  bool has_loop(std::size_t x) const { return has_edge(x, x); }
  const std::vector<std::size_t>& successors(std::size_t x) const { return successors_[x]; }

  double edge_weight(std::size_t x, std::size_t y) const { return stationary_(x) * transition_(x, y); }

 private:
  friend BaseChain validate_chain(const Matrix&, std::vector<std::string>);

  BaseChain() = default;

  std::vector<std::string> labels_;
  Matrix transition_;
  Vector stationary_;
  double w_min_ = 0.0;
  std::vector<unsigned char> support_;
  std::vector<std::vector<std::size_t>> successors_;
};

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kReversibilityTolerance = 1e-12;

// Checks the transition matrix and computes the stationary measure (dense solve of
// (A^T - I) pi = 0, sum pi = 1) and w_min. Throws ChainError naming the first violated property.
BaseChain validate_chain(const Matrix& transition, std::vector<std::string> labels = {});

// Power iteration on pi <- pi A from the uniform vector. Used as a cross-check only.
Vector stationary_power_iteration(const Matrix& transition, int iterations = 10000);

// Period of the support digraph (gcd of closed-walk lengths). Requires strong connectivity.
std::size_t chain_period(const Matrix& transition);

struct ChainSpectrum {
  // Sorted by absolute value, descending; eigenvalues[0] == 1.
  std::vector<double> eigenvalues;
  // basis(a, s) is the value of basis function s at state a. Orthonormal under mu,
  // basis column 0 is the constant 1.
  Matrix basis;
  // Second-largest absolute eigenvalue.
  double lambda2 = 0.0;
};

ChainSpectrum eigendecompose(const BaseChain& chain);

// V^n with the product chain A^{(x)n} and product measure mu^{(x)n}.
// Cheap to copy: the chain and measure table are shared.
class ProductSpace {
 public:
  static constexpr std::size_t kDefaultPointCap = 43046721;  // 3^16

  ProductSpace(std::shared_ptr<const BaseChain> base, std::size_t n,
               std::size_t point_cap = kDefaultPointCap);

  const BaseChain& base() const noexcept { return *base_; }
  const std::shared_ptr<const BaseChain>& base_ptr() const noexcept { return base_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t radix() const noexcept { return base_->size(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t point_cap() const noexcept { return point_cap_; }

  // Same base chain object and dimension.
  bool same_as(const ProductSpace& other) const noexcept {
    return base_ == other.base_ && n_ == other.n_;
  }

  // Space over the same base with a different dimension (cells of V^I, restrictions).
  ProductSpace with_dimension(std::size_t m) const { return ProductSpace(base_, m, point_cap_); }

  std::vector<std::size_t> digits(PointIndex x) const;
  void decode(PointIndex x, std::span<std::size_t> out) const;
  PointIndex encode(std::span<const std::size_t> digits) const;

  double measure(PointIndex x) const { return (*measure_)[x]; }
  const std::vector<double>& measure_table() const noexcept { return *measure_; }

  // Combinatorial adjacency under A^{(x)n}: A(x_i, y_i) > 0 in every coordinate.
  bool adjacent(PointIndex x, PointIndex y) const;

  // Calls fn(y) for every y with A^{(x)n}(x, y) > 0, in ascending index order.
  template <typename Fn>
  void for_each_neighbor(PointIndex x, Fn&& fn) const;

  // w_min^n.
  double min_edge_weight() const;

 private:
  std::shared_ptr<const BaseChain> base_;
  std::size_t n_;
  std::size_t size_;
  std::size_t point_cap_;
  std::shared_ptr<const std::vector<double>> measure_;
};

// |V|^n with overflow and cap checks.
std::size_t checked_power(std::size_t radix, std::size_t n, std::size_t cap);

// mu^{(x)n}(x) A^{(x)n}(x, y) as a product of per-coordinate factors.
double edge_weight(const ProductSpace& space, PointIndex x, PointIndex y);

// out[.., a, ..] = sum_b op(a, b) in[.., b, ..] along every tensor axis in turn.
// Never materializes the Kronecker power; cost n * radix^(n+1).
std::vector<double> apply_axiswise(std::size_t radix, std::size_t n, const Matrix& op,
                                   std::span<const double> values);

// A^{(x)n} f.
std::vector<double> apply_markov(const ProductSpace& space, std::span<const double> f);

// sum_x mu(x) f(x) (A g)(x).
double quad_form(const ProductSpace& space, std::span<const double> f, std::span<const double> g);

// sum_x mu(x) f(x) g(x).
double inner_product(const ProductSpace& space, std::span<const double> f,
                     std::span<const double> g);

// Built-in chains.
// Uniform walk on the other two vertices of a triangle: A = (J - I) / 2.
BaseChain k3_chain();

template <typename Fn>
void ProductSpace::for_each_neighbor(PointIndex x, Fn&& fn) const {
  if (n_ == 0) {
    fn(PointIndex{0});
    return;
  }
  std::vector<std::size_t> xd = digits(x);
  std::vector<const std::vector<std::size_t>*> choices(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    choices[i] = &base_->successors(xd[i]);
    if (choices[i]->empty()) return;
  }
  std::vector<std::size_t> pos(n_, 0);
  const std::size_t r = radix();
  for (;;) {
    PointIndex y = 0;
    for (std::size_t i = 0; i < n_; ++i) y = y * r + (*choices[i])[pos[i]];
    fn(y);
    std::size_t i = n_;
    while (i > 0) {
      --i;
      if (++pos[i] < choices[i]->size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace removal
