#include "removal/kneser.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace removal {

namespace {

constexpr std::size_t kMaxLayerSize = 100'000'000;

__extension__ typedef unsigned __int128 Wide;

std::uint64_t binomial_u64(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Wide r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<std::uint64_t>(r);
}

SubsetMask full_mask(std::size_t n) {
  return n >= 64 ? ~SubsetMask{0} : (SubsetMask{1} << n) - 1;
}

void require_cube(const PointFunction& g, double p) {
  const BaseChain& base = g.space().base();
  if (base.size() != 2 || std::abs(base.transition()(0, 1) - p / (1.0 - p)) > 1e-12) {
    throw DomainError("function does not live on the disjointness cube for this p");
  }
  if (g.space().n() > kMaxKneserN) throw DomainError("cube dimension too large");
}

}  // namespace

BaseChain disjointness_chain(double p) {
  if (!(p > 0.0 && p < 0.5)) throw DomainError("disjointness chain needs 0 < p < 1/2");
  Matrix a(2, 2);
  a << (1.0 - 2.0 * p) / (1.0 - p), p / (1.0 - p), 1.0, 0.0;
  return validate_chain(a, {"0", "1"});
}

ProductSpace disjointness_space(double p, std::size_t n, std::size_t point_cap) {
  return ProductSpace(std::make_shared<const BaseChain>(disjointness_chain(p)), n, point_cap);
}

PointIndex mask_to_point(std::size_t n, SubsetMask mask) {
  PointIndex x = 0;
  for (std::size_t i = 0; i < n; ++i) x = (x << 1) | ((mask >> i) & 1U);
  return x;
}

SubsetMask point_to_mask(std::size_t n, PointIndex point) {
  SubsetMask m = 0;
  for (std::size_t i = 0; i < n; ++i) m |= ((point >> (n - 1 - i)) & 1U) << i;
  return m;
}

double mu_pp(std::size_t n, double p, SubsetMask x, SubsetMask y) {
  if ((x & y) != 0) return 0.0;
  const int a = std::popcount(x);
  const int b = std::popcount(y);
  return std::pow(p, a + b) * std::pow(1.0 - 2.0 * p, static_cast<double>(n) - a - b);
}

double edge_cube(const PointFunction& g, double p) {
  require_cube(g, p);
  const std::size_t n = g.space().n();
  const SubsetMask full = full_mask(n);
  double total = 0.0;
  for (SubsetMask x = 0; x <= full; ++x) {
    const double gx = g[mask_to_point(n, x)];
    if (gx != 0.0) {
      const SubsetMask comp = full & ~x;
      double inner = 0.0;
      for (SubsetMask y = comp;; y = (y - 1) & comp) {
        inner += g[mask_to_point(n, y)] * mu_pp(n, p, x, y);
        if (y == 0) break;
      }
      total += gx * inner;
    }
    if (x == full) break;
  }
  return total;
}

double binomial(std::size_t n, std::size_t k) { return static_cast<double>(binomial_u64(n, k)); }

std::uint64_t subset_rank(SubsetMask mask) {
  std::uint64_t r = 0;
  std::size_t i = 1;
  while (mask != 0) {
    const auto c = static_cast<std::size_t>(std::countr_zero(mask));
    r += binomial_u64(c, i++);
    mask &= mask - 1;
  }
  return r;
}

SubsetMask subset_unrank(std::size_t k, std::uint64_t rank) {
  SubsetMask m = 0;
  for (std::size_t i = k; i >= 1; --i) {
    std::size_t c = i - 1;
    while (binomial_u64(c + 1, i) <= rank) ++c;
    rank -= binomial_u64(c, i);
    m |= SubsetMask{1} << c;
  }
  return m;
}

LayerFunction::LayerFunction(std::size_t n, std::size_t k, std::vector<double> values)
    : n_(n), k_(k), values_(std::move(values)) {
  if (n > kMaxKneserN) throw DomainError("layer: n too large");
  if (k == 0 || 2 * k >= n) throw DomainError("layer: needs 0 < k < n/2");
  const std::uint64_t count = binomial_u64(n, k);
  if (count > kMaxLayerSize) throw CapExceeded("layer size", count, kMaxLayerSize);
  if (values_.size() != count) throw DimensionError("layer: expected C(n,k) values");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("layer: values must lie in [0,1]");
  }
  // Gosper's successor walks k-subsets in increasing mask order, which is rank order.
  auto masks = std::make_shared<std::vector<SubsetMask>>();
  masks->reserve(count);
  SubsetMask m = (SubsetMask{1} << k) - 1;
  for (std::uint64_t r = 0; r < count; ++r) {
    masks->push_back(m);
    const SubsetMask c = m & (~m + 1);
    const SubsetMask hi = m + c;
    m = (((m ^ hi) >> 2) / c) | hi;
  }
  masks_ = std::move(masks);
}

LayerFunction LayerFunction::constant(std::size_t n, std::size_t k, double value) {
  return LayerFunction(n, k, std::vector<double>(binomial_u64(n, k), value));
}

LayerFunction LayerFunction::star(std::size_t n, std::size_t k, std::size_t element) {
  if (element >= n) throw DomainError("star: element out of range");
  std::vector<double> v(binomial_u64(n, k));
  for (std::uint64_t r = 0; r < v.size(); ++r) v[r] = (subset_unrank(k, r) >> element) & 1U ? 1.0 : 0.0;
  return LayerFunction(n, k, std::move(v));
}

LayerEdge edge_layer(const LayerFunction& f) {
  const auto& masks = f.masks();
  double s = 0.0;
  for (std::size_t a = 0; a < masks.size(); ++a) {
    if (f[a] == 0.0) continue;
    double inner = 0.0;
    for (std::size_t b = 0; b < masks.size(); ++b) {
      if ((masks[a] & masks[b]) == 0) inner += f[b];
    }
    s += f[a] * inner;
  }
  LayerEdge e;
  e.ordered = s / (binomial(f.n(), f.k()) * binomial(f.n() - f.k(), f.k()));
  e.unordered = e.ordered / 2.0;
  return e;
}

void require_layer_ratio(std::size_t n, std::size_t k, double p) {
  if (!(p > 0.0 && p < 0.5)) throw DomainError("layer: p must lie in (0, 1/2)");
  if (std::abs(p * static_cast<double>(n) - static_cast<double>(k)) > 1e-9) {
    throw DomainError("layer: k must equal p n (got k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
  }
}

PointFunction up_lift(const LayerFunction& f, double p) {
  require_layer_ratio(f.n(), f.k(), p);
  const std::size_t n = f.n();
  const ProductSpace space = disjointness_space(p, n);
  const SubsetMask full = full_mask(n);
  std::vector<double> acc(space.size(), 0.0);
  const auto& masks = f.masks();
  for (std::size_t r = 0; r < masks.size(); ++r) {
    if (f[r] == 0.0) continue;
    const SubsetMask comp = full & ~masks[r];
    for (SubsetMask s = comp;; s = (s - 1) & comp) {
      acc[mask_to_point(n, masks[r] | s)] += f[r];
      if (s == 0) break;
    }
  }
  for (PointIndex x = 0; x < acc.size(); ++x) {
    const auto size = static_cast<std::size_t>(std::popcount(x));
    acc[x] = size >= f.k() ? std::min(1.0, acc[x] / binomial(size, f.k())) : 0.0;
  }
  return PointFunction(space, std::move(acc), Range::kUnit);
}

double c_constant(double p, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
  require_layer_ratio(n, k, p);
  return edge_cube(up_lift(LayerFunction::constant(n, k, 1.0), p), p);
}

double down_inner_sum(std::size_t n, std::size_t k, double p, std::size_t j_size, std::size_t w_size) {
  if (w_size > k || w_size > j_size || j_size - w_size > n - k) return 0.0;
  const std::size_t m = n - k - (j_size - w_size);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double ratio = 1.0;  // (m)_i / (n-k)_i
  double s = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    if (i > 0) ratio *= static_cast<double>(m - i + 1) / static_cast<double>(n - k - i + 1);
    const double lchoose = std::lgamma(n + 1.0) - std::lgamma(k + i + 1.0) - std::lgamma(n - k - i + 1.0);
    s += std::exp(static_cast<double>(k + i) * lp + static_cast<double>(n - k - i) * lq + lchoose) * ratio;
  }
  return s;
}

std::vector<DownRatio> down_ratios(const LayerFunction& f, const PointFunction& g,
                                   const CoordinateSet& coords, double p) {
  require_layer_ratio(f.n(), f.k(), p);
  require_cube(g, p);
  const std::size_t n = f.n();
  if (g.space().n() != n) throw DimensionError("down ratio: layer and cube dimensions differ");
  coords.validate(n);

  const std::size_t cells = std::size_t{1} << coords.size();
  std::vector<DownRatio> out(cells);
  const std::vector<PointIndex> proj = projection_table(g.space(), coords);
  for (PointIndex x = 0; x < g.size(); ++x) out[proj[x]].v_g += g[x] * g.space().measure(x);

  const double norm = binomial(n, f.k());
  const auto& masks = f.masks();
  for (std::size_t r = 0; r < masks.size(); ++r) {
    out[proj[mask_to_point(n, masks[r])]].v_f += f[r] / norm;
  }

  for (PointIndex w = 0; w < cells; ++w) {
    DownRatio& d = out[w];
    d.w = w;
    d.weight = static_cast<std::size_t>(std::popcount(w));
    if (d.v_f > 0.0) d.ratio = d.v_g > 0.0 ? d.v_f / d.v_g : HUGE_VAL;
    d.inner_sum = down_inner_sum(n, f.k(), p, coords.size(), d.weight);
    d.inner_ok = d.inner_sum >= 0.2;
    d.bound_ok = d.v_f <= 5.0 * d.v_g + 1e-12;
  }
  return out;
}

DownRatio down_ratio(const LayerFunction& f, const PointFunction& g, const CoordinateSet& coords,
                     PointIndex w, double p) {
  std::vector<DownRatio> all = down_ratios(f, g, coords, p);
  if (w >= all.size()) throw DomainError("down ratio: cell out of range");
  return all[w];
}

bool is_intersecting(std::span<const SubsetMask> family) {
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      if ((family[i] & family[j]) == 0) return false;
    }
  }
  return true;
}

std::vector<SubsetMask> cells_to_masks(std::size_t j_size, std::span<const PointIndex> cells) {
  std::vector<SubsetMask> out;
  out.reserve(cells.size());
  for (PointIndex c : cells) out.push_back(point_to_mask(j_size, c));
  std::sort(out.begin(), out.end());
  return out;
}

KneserCapture kneser_capture(const LayerFunction& f, double eps, double p, const CaptureParams& params,
                             std::size_t mwis_cap) {
  require_layer_ratio(f.n(), f.k(), p);
  KneserCapture r;
  const PointFunction g = up_lift(f, p);
  r.edge = edge_layer(f);
  r.edge_lifted = edge_cube(g, p);
  r.capture = independent_junta_capture(g, eps, params, mwis_cap);
  r.coords = r.capture.coords;
  r.cells = r.capture.cells;
  r.family = cells_to_masks(r.coords.size(), r.cells);
  r.intersecting = is_intersecting(r.family);
  if (!r.intersecting) throw InvariantViolation("kneser capture: independent family is not intersecting");
  r.cube_loss = r.capture.loss;

  std::vector<bool> in(std::size_t{1} << r.coords.size(), false);
  for (SubsetMask m : r.family) in[m] = true;
  const auto& masks = f.masks();
  double s = 0.0;
  for (std::size_t k = 0; k < masks.size(); ++k) {
    SubsetMask w = 0;
    for (std::size_t t = 0; t < r.coords.size(); ++t) w |= ((masks[k] >> r.coords[t]) & 1U) << t;
    if (!in[w]) s += f[k];
  }
  r.loss = s / binomial(f.n(), f.k());
  r.loss_bound = 5.0 * eps;
  r.loss_ok = r.loss <= r.loss_bound;
  return r;
}

}  // namespace removal
