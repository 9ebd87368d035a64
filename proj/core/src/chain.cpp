#include "removal/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace removal {

const char* to_string(ChainViolation v) {
  switch (v) {
    case ChainViolation::kTooFewStates: return "too-few-states";
    case ChainViolation::kNotSquare: return "not-square";
    case ChainViolation::kNegativeEntry: return "negative-entry";
    case ChainViolation::kNotRowStochastic: return "not-row-stochastic";
    case ChainViolation::kReducible: return "reducible";
    case ChainViolation::kPeriodic: return "periodic";
    case ChainViolation::kNotReversible: return "not-reversible";
  }
  return "unknown";
}

ChainError::ChainError(ChainViolation kind, std::size_t first, std::size_t second,
                       const std::string& detail)
    : DomainError(std::string(to_string(kind)) + " (witness " + std::to_string(first) + ", " +
                  std::to_string(second) + "): " + detail),
      kind_(kind),
      first_(first),
      second_(second) {}

namespace {

std::vector<std::size_t> bfs_levels(const Matrix& a, bool reverse) {
  const auto n = static_cast<std::size_t>(a.rows());
  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> level(n, kUnseen);
  std::deque<std::size_t> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      const double w = reverse ? a(v, u) : a(u, v);
      if (w > 0.0 && level[v] == kUnseen) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return level;
}

}  // namespace

std::size_t chain_period(const Matrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  const auto level = bfs_levels(a, false);
  std::size_t g = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (a(u, v) > 0.0) {
        const auto lhs = static_cast<long long>(level[u]) + 1;
        const auto rhs = static_cast<long long>(level[v]);
        g = std::gcd(g, static_cast<std::size_t>(std::llabs(lhs - rhs)));
      }
    }
  }
  return g;
}

BaseChain validate_chain(const Matrix& transition, std::vector<std::string> labels) {
  if (transition.rows() != transition.cols()) {
    throw ChainError(ChainViolation::kNotSquare, static_cast<std::size_t>(transition.rows()),
                     static_cast<std::size_t>(transition.cols()), "transition matrix must be square");
  }
  const auto n = static_cast<std::size_t>(transition.rows());
  if (n < 2) {
    throw ChainError(ChainViolation::kTooFewStates, n, n, "need at least two states");
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) {
    throw DomainError("label count " + std::to_string(labels.size()) + " does not match " +
                      std::to_string(n) + " states");
  }

  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double v = transition(x, y);
      if (!std::isfinite(v) || v < 0.0) {
        throw ChainError(ChainViolation::kNegativeEntry, x, y, "entries must be finite and >= 0");
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    const double s = transition.row(static_cast<Eigen::Index>(x)).sum();
    if (std::abs(s - 1.0) > kRowSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << x << " sums to " << s;
      throw ChainError(ChainViolation::kNotRowStochastic, x, x, os.str());
    }
  }

  const auto forward = bfs_levels(transition, false);
  const auto backward = bfs_levels(transition, true);
  for (std::size_t s = 0; s < n; ++s) {
    if (forward[s] == std::numeric_limits<std::size_t>::max()) {
      throw ChainError(ChainViolation::kReducible, 0, s, "state unreachable from state 0");
    }
    if (backward[s] == std::numeric_limits<std::size_t>::max()) {
      throw ChainError(ChainViolation::kReducible, s, 0, "state 0 unreachable from this state");
    }
  }

  if (const std::size_t period = chain_period(transition); period != 1) {
    // Witness: an edge whose level difference is a nonzero multiple of the period.
    std::size_t wu = 0, wv = 0;
    for (std::size_t u = 0; u < n && wu == wv; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (transition(u, v) > 0.0 && forward[u] + 1 != forward[v]) {
          wu = u;
          wv = v;
          break;
        }
      }
    }
    throw ChainError(ChainViolation::kPeriodic, wu, wv,
                     "support digraph has period " + std::to_string(period));
  }

  // Stationary measure: (A^T - I) pi = 0 with the last equation replaced by sum pi = 1.
  Matrix system = transition.transpose() - Matrix::Identity(static_cast<Eigen::Index>(n),
                                                            static_cast<Eigen::Index>(n));
  system.row(static_cast<Eigen::Index>(n - 1)).setOnes();
  Vector rhs = Vector::Zero(static_cast<Eigen::Index>(n));
  rhs(static_cast<Eigen::Index>(n - 1)) = 1.0;
  Vector pi = system.fullPivLu().solve(rhs);
  for (std::size_t x = 0; x < n; ++x) {
    if (!(pi(static_cast<Eigen::Index>(x)) > 0.0)) {
      throw NumericalError("stationary solve produced a nonpositive entry at state " +
                           std::to_string(x));
    }
  }
  pi /= pi.sum();

  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double fwd = pi(static_cast<Eigen::Index>(x)) * transition(x, y);
      const double bwd = pi(static_cast<Eigen::Index>(y)) * transition(y, x);
      if (std::abs(fwd - bwd) > kReversibilityTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "mu(x)A(x,y) = " << fwd << " but mu(y)A(y,x) = " << bwd;
        throw ChainError(ChainViolation::kNotReversible, x, y, os.str());
      }
    }
  }

  BaseChain chain;
  chain.labels_ = std::move(labels);
  chain.transition_ = transition;
  chain.stationary_ = pi;
  chain.support_.assign(n * n, 0);
  chain.successors_.assign(n, {});
  double w_min = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (transition(x, y) > 0.0) {
        chain.support_[x * n + y] = 1;
        chain.successors_[x].push_back(y);
        w_min = std::min(w_min, pi(static_cast<Eigen::Index>(x)) * transition(x, y));
      }
    }
  }
  chain.w_min_ = w_min;
  return chain;
}

Vector stationary_power_iteration(const Matrix& transition, int iterations) {
  const auto n = transition.rows();
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int t = 0; t < iterations; ++t) {
    Eigen::RowVectorXd next = pi * transition;
    const double delta = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (delta < 1e-16) break;
  }
  return pi.transpose() / pi.sum();
}

ChainSpectrum eigendecompose(const BaseChain& chain) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  const Vector& mu = chain.stationary();
  const Vector sqrt_mu = mu.cwiseSqrt();

  // D^{1/2} A D^{-1/2} is symmetric for a reversible chain.
  Matrix sym(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      sym(x, y) = sqrt_mu(x) * chain.transition()(x, y) / sqrt_mu(y);
    }
  }
  sym = 0.5 * (sym + sym.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed to converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double aa = std::abs(values(a));
    const double ab = std::abs(values(b));
    if (aa != ab) return aa > ab;
    return values(a) > values(b);
  });

  ChainSpectrum out;
  out.basis.resize(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Eigen::Index src = order[static_cast<std::size_t>(s)];
    out.eigenvalues.push_back(values(src));
    Vector b = solver.eigenvectors().col(src).cwiseQuotient(sqrt_mu);
    // Sign convention: largest-magnitude entry (first on ties) is positive.
    Eigen::Index arg = 0;
    for (Eigen::Index a = 1; a < n; ++a) {
      if (std::abs(b(a)) > std::abs(b(arg)) + 1e-12) arg = a;
    }
    if (b(arg) < 0) b = -b;
    out.basis.col(s) = b;
  }

  if (std::abs(out.eigenvalues[0] - 1.0) > 1e-10) {
    throw NumericalError("leading eigenvalue is not 1");
  }
  out.eigenvalues[0] = 1.0;
  out.basis.col(0).setOnes();
  out.lambda2 = n > 1 ? std::abs(out.eigenvalues[1]) : 0.0;
  if (!(out.lambda2 < 1.0 - 1e-12)) {
    throw NumericalError("second absolute eigenvalue is not below 1");
  }
  return out;
}

std::size_t checked_power(std::size_t radix, std::size_t n, std::size_t cap) {
  // An unrepresentable size always exceeds the cap; it is reported as SIZE_MAX.
  std::size_t size = 1;
  bool overflow = false;
  for (std::size_t i = 0; i < n && !overflow; ++i) {
    overflow = __builtin_mul_overflow(size, radix, &size);
  }
  if (overflow) size = std::numeric_limits<std::size_t>::max();
  if (overflow || size > cap) {
    throw CapExceeded("table size " + std::to_string(radix) + "^" + std::to_string(n), size, cap);
  }
  return size;
}

ProductSpace::ProductSpace(std::shared_ptr<const BaseChain> base, std::size_t n,
                           std::size_t point_cap)
    : base_(std::move(base)), n_(n), point_cap_(point_cap) {
  if (!base_) throw DomainError("product space needs a base chain");
  size_ = checked_power(base_->size(), n_, point_cap_);

  // mu^{(x)n} by repeated outer product; coordinate 0 most significant.
  auto table = std::make_shared<std::vector<double>>(1, 1.0);
  table->reserve(size_);
  const Vector& mu = base_->stationary();
  for (std::size_t i = 0; i < n_; ++i) {
    std::vector<double> next;
    next.reserve(table->size() * radix());
    for (double m : *table) {
      for (std::size_t a = 0; a < radix(); ++a) next.push_back(m * mu(static_cast<Eigen::Index>(a)));
    }
    *table = std::move(next);
  }
  measure_ = std::move(table);
}

std::vector<std::size_t> ProductSpace::digits(PointIndex x) const {
  std::vector<std::size_t> out(n_);
  decode(x, out);
  return out;
}

void ProductSpace::decode(PointIndex x, std::span<std::size_t> out) const {
  const std::size_t r = radix();
  for (std::size_t i = n_; i > 0; --i) {
    out[i - 1] = static_cast<std::size_t>(x % r);
    x /= r;
  }
}

PointIndex ProductSpace::encode(std::span<const std::size_t> d) const {
  PointIndex x = 0;
  for (std::size_t i = 0; i < n_; ++i) x = x * radix() + d[i];
  return x;
}

bool ProductSpace::adjacent(PointIndex x, PointIndex y) const {
  const std::size_t r = radix();
  for (std::size_t i = 0; i < n_; ++i) {
    if (!base_->has_edge(static_cast<std::size_t>(x % r), static_cast<std::size_t>(y % r))) {
      return false;
    }
    x /= r;
    y /= r;
  }
  return true;
}

double ProductSpace::min_edge_weight() const {
  return std::pow(base_->w_min(), static_cast<double>(n_));
}

double edge_weight(const ProductSpace& space, PointIndex x, PointIndex y) {
  const std::size_t r = space.radix();
  double w = 1.0;
  for (std::size_t i = 0; i < space.n(); ++i) {
    w *= space.base().edge_weight(static_cast<std::size_t>(x % r), static_cast<std::size_t>(y % r));
    x /= r;
    y /= r;
  }
  return w;
}

std::vector<double> apply_axiswise(std::size_t radix, std::size_t n, const Matrix& op,
                                   std::span<const double> values) {
  std::vector<double> cur(values.begin(), values.end());
  std::vector<double> next(cur.size());
  std::vector<double> column(radix);
  std::size_t stride = cur.size();
  for (std::size_t axis = 0; axis < n; ++axis) {
    const std::size_t block = stride;
    stride /= radix;
    for (std::size_t outer = 0; outer < cur.size(); outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (std::size_t b = 0; b < radix; ++b) column[b] = cur[base + b * stride];
        for (std::size_t a = 0; a < radix; ++a) {
          double acc = 0.0;
          for (std::size_t b = 0; b < radix; ++b) {
            acc += op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * column[b];
          }
          next[base + a * stride] = acc;
        }
      }
    }
    cur.swap(next);
  }
  return cur;
}

namespace {

void require_size(const ProductSpace& space, std::size_t got, const char* what) {
  if (got != space.size()) {
    throw DimensionError(std::string(what) + ": table has " + std::to_string(got) +
                         " entries, space has " + std::to_string(space.size()));
  }
}

}  // namespace

std::vector<double> apply_markov(const ProductSpace& space, std::span<const double> f) {
  require_size(space, f.size(), "apply_markov");
  return apply_axiswise(space.radix(), space.n(), space.base().transition(), f);
}

double quad_form(const ProductSpace& space, std::span<const double> f, std::span<const double> g) {
  require_size(space, f.size(), "quad_form");
  require_size(space, g.size(), "quad_form");
  const std::vector<double> ag = apply_markov(space, g);
  return inner_product(space, f, ag);
}

double inner_product(const ProductSpace& space, std::span<const double> f,
                     std::span<const double> g) {
  require_size(space, f.size(), "inner_product");
  require_size(space, g.size(), "inner_product");
  const auto& mu = space.measure_table();
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) acc += mu[x] * f[x] * g[x];
  return acc;
}

BaseChain k3_chain() {
  Matrix a(3, 3);
  a << 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0;
  return validate_chain(a, {"0", "1", "2"});
}

}  // namespace removal
