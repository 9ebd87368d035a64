#include "removal/junta.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace removal {

const char* to_string(CaptureMode m) {
  switch (m) {
    case CaptureMode::kPractical: return "practical";
    case CaptureMode::kFaithful: return "faithful";
  }
  return "?";
}

namespace {

constexpr double kOutsideTolerance = 1e-12;

void require_unit_pair(const PointFunction& f1, const PointFunction& f2) {
  require_same_space(f1, f2, "junta capture");
  if (f1.range() != Range::kUnit || f2.range() != Range::kUnit) {
    throw DomainError("junta capture needs [0,1] functions");
  }
}

std::vector<PointIndex> threshold_cells(const PointFunction& cond, double eps) {
  std::vector<PointIndex> cells;
  for (PointIndex a = 0; a < cond.size(); ++a) {
    if (cond[a] >= eps) cells.push_back(a);
  }
  return cells;
}

double outside_mass(const PointFunction& cond, const std::vector<PointIndex>& cells) {
  std::vector<bool> in(cond.size(), false);
  for (PointIndex a : cells) in[a] = true;
  double s = 0.0;
  for (PointIndex a = 0; a < cond.size(); ++a) {
    if (!in[a]) s += cond.space().measure(a) * cond[a];
  }
  return s;
}

double cell_measure(const ProductSpace& cells_space, const std::vector<PointIndex>& cells) {
  double s = 0.0;
  for (PointIndex a : cells) s += cells_space.measure(a);
  return s;
}

double cross_term(const ProductSpace& cells_space, const std::vector<PointIndex>& t1,
                  const std::vector<PointIndex>& t2) {
  const PointFunction i1 = PointFunction::indicator(cells_space, t1);
  const PointFunction i2 = PointFunction::indicator(cells_space, t2);
  return quad_form(i1, i2);
}

// Coefficients of N_eta f from those of f.
std::vector<double> noisy_coefficients(const FourierExpansion& e, double eta) {
  std::vector<double> c(e.coefficients().begin(), e.coefficients().end());
  for (PointIndex s = 0; s < c.size(); ++s) c[s] *= std::pow(eta, static_cast<double>(e.degree(s)));
  return c;
}

struct NoisyPair {
  PointFunction g1;
  PointFunction g2;
  std::vector<double> inf1;
  std::vector<double> inf2;
};

PointFunction clamp_synthesize(const FourierExpansion& e) {
  std::vector<double> v = e.synthesize();
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  return PointFunction(e.space(), std::move(v), Range::kUnit);
}

NoisyPair make_noisy(const FourierExpansion& e1, const FourierExpansion& e2, double eta) {
  FourierExpansion n1(e1.space(), e1.spectrum(), noisy_coefficients(e1, eta));
  FourierExpansion n2(e2.space(), e2.spectrum(), noisy_coefficients(e2, eta));
  return NoisyPair{clamp_synthesize(n1), clamp_synthesize(n2), influences(n1), influences(n2)};
}

CaptureOutcome capture_from_noisy(const PointFunction& f1, const PointFunction& f2,
                                  const NoisyPair& noisy, double eps, double eta, double gamma,
                                  std::size_t j_budget) {
  const std::size_t n = f1.space().n();
  std::vector<std::size_t> heavy;
  for (std::size_t i = 0; i < n; ++i) {
    if (noisy.inf1[i] > gamma || noisy.inf2[i] > gamma) heavy.push_back(i);
  }

  CaptureOutcome out;
  if (heavy.size() > j_budget) {
    out.status = CaptureStatus::kBudgetExceeded;
    // Partial result on the j_budget most influential coordinates.
    std::stable_sort(heavy.begin(), heavy.end(), [&](std::size_t a, std::size_t b) {
      return std::max(noisy.inf1[a], noisy.inf2[a]) > std::max(noisy.inf1[b], noisy.inf2[b]);
    });
    heavy.resize(j_budget);
  }

  JuntaCapture& c = out.capture;
  c.coords = CoordinateSet(std::move(heavy));
  c.eps = eps;
  c.eta = eta;
  c.gamma = gamma;

  const PointFunction cond_g1 = conditional_expectation(noisy.g1, c.coords);
  const PointFunction cond_g2 = conditional_expectation(noisy.g2, c.coords);
  c.t1 = threshold_cells(cond_g1, eps);
  c.t2 = threshold_cells(cond_g2, eps);

  const PointFunction cond_f1 = conditional_expectation(f1, c.coords);
  const PointFunction cond_f2 = conditional_expectation(f2, c.coords);
  const ProductSpace& cells = cond_f1.space();
  c.outside1 = outside_mass(cond_f1, c.t1);
  c.outside2 = outside_mass(cond_f2, c.t2);
  c.measure1 = cell_measure(cells, c.t1);
  c.measure2 = cell_measure(cells, c.t2);
  c.cross = cross_term(cells, c.t1, c.t2);

  // The cellwise low-noise bound holds for every J, so it is checked on partial results too.
  if (c.outside1 > eps + kOutsideTolerance || c.outside2 > eps + kOutsideTolerance) {
    throw InvariantViolation("junta capture: outside mass exceeds eps");
  }
  return out;
}

}  // namespace

CaptureOutcome junta_capture_spectral(const PointFunction& f1, const PointFunction& f2, double eps,
                                      double eta, double gamma, std::size_t j_budget) {
  require_unit_pair(f1, f2);
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("junta capture: eta must lie in (0, 1]");
  if (!(gamma > 0.0)) throw DomainError("junta capture: gamma must be positive");
  if (!(eps > 0.0)) throw DomainError("junta capture: eps must be positive");
  const ChainSpectrum spectrum = eigendecompose(f1.space().base());
  const NoisyPair noisy =
      make_noisy(fourier_expand(f1, spectrum), fourier_expand(f2, spectrum), eta);
  return capture_from_noisy(f1, f2, noisy, eps, eta, gamma, j_budget);
}

CaptureOutcome junta_capture(const PointFunction& f1, const PointFunction& f2, double eps,
                             const CaptureParams& params) {
  if (params.mode == CaptureMode::kFaithful) {
    throw DomainError("faithful mode reports parameters only; use faithful_parameters()");
  }
  require_unit_pair(f1, f2);
  if (!(eps > 0.0)) throw DomainError("junta capture: eps must be positive");
  if (!(params.eta > 0.0 && params.eta <= 1.0)) throw DomainError("junta capture: eta must lie in (0, 1]");
  if (!(params.gamma > 0.0)) throw DomainError("junta capture: gamma must be positive");

  const double target = params.cross_target < 0.0 ? eps : params.cross_target;
  const ChainSpectrum spectrum = eigendecompose(f1.space().base());
  const NoisyPair noisy =
      make_noisy(fourier_expand(f1, spectrum), fourier_expand(f2, spectrum), params.eta);

  double gamma = params.gamma;
  CaptureOutcome out = capture_from_noisy(f1, f2, noisy, eps, params.eta, gamma, params.j_budget);
  out.capture.mode = params.mode;
  if (out.status != CaptureStatus::kOk) return out;

  std::size_t halvings = 0;
  while (out.capture.cross > target && out.capture.coords.size() < f1.space().n() &&
         gamma / 2.0 >= params.gamma_floor) {
    CaptureOutcome next =
        capture_from_noisy(f1, f2, noisy, eps, params.eta, gamma / 2.0, params.j_budget);
    if (next.status != CaptureStatus::kOk) break;
    gamma /= 2.0;
    ++halvings;
    out = std::move(next);
  }
  out.capture.gamma_halvings = halvings;
  out.capture.mode = params.mode;
  return out;
}

namespace {

struct Candidate {
  std::vector<PointIndex> cells;
  std::uint64_t mask = 0;  // valid in exhaustive mode
  double outside = 0.0;
};

bool canonical_less(const std::vector<PointIndex>& a, const std::vector<PointIndex>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

// Feasible T for one side, in canonical order (size, then lexicographic).
std::vector<Candidate> candidates(const PointFunction& cond, double eps, bool exhaustive) {
  const std::size_t m = cond.size();
  std::vector<Candidate> out;
  auto consider = [&](std::vector<PointIndex> cells, std::uint64_t mask) {
    const double o = outside_mass(cond, cells);
    if (o <= eps) out.push_back(Candidate{std::move(cells), mask, o});
  };
  if (exhaustive) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      std::vector<PointIndex> cells;
      for (std::size_t a = 0; a < m; ++a) {
        if ((mask >> a) & 1U) cells.push_back(a);
      }
      consider(std::move(cells), mask);
    }
  } else {
    std::vector<double> levels(cond.values().begin(), cond.values().end());
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    consider({}, 0);
    for (double t : levels) consider(threshold_cells(cond, t), 0);
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return canonical_less(a.cells, b.cells);
  });
  return out;
}

void for_each_subset(std::size_t n, std::size_t size, const auto& fn) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(idx);
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t k = i; k < size; ++k) idx[k] = idx[k - 1] + 1;
  }
}

}  // namespace

JuntaCapture junta_capture_bruteforce(const PointFunction& f1, const PointFunction& f2, double eps,
                                      std::size_t j_max, std::size_t budget) {
  require_unit_pair(f1, f2);
  if (!(eps > 0.0)) throw DomainError("brute-force capture: eps must be positive");
  const std::size_t n = f1.space().n();
  j_max = std::min(j_max, n);
  constexpr double kTieTolerance = 1e-13;

  JuntaCapture best;
  bool have = false;
  double best_total = 0.0;
  std::size_t work = 0;

  for (std::size_t size = 0; size <= j_max; ++size) {
    for_each_subset(n, size, [&](const std::vector<std::size_t>& idx) {
      const CoordinateSet coords(idx);
      const PointFunction c1 = conditional_expectation(f1, coords);
      const PointFunction c2 = conditional_expectation(f2, coords);
      const ProductSpace& cells = c1.space();
      const bool exhaustive = cells.size() <= kExhaustiveCellLimit;
      const std::vector<Candidate> k1 = candidates(c1, eps, exhaustive);
      const std::vector<Candidate> k2 = candidates(c2, eps, exhaustive);
      work += k1.size() * k2.size();
      if (work > budget) throw CapExceeded("brute-force capture work", work, budget);

      // Edge weights of V^J, dense.
      const std::size_t m = cells.size();
      std::vector<double> w(m * m, 0.0);
      for (PointIndex a = 0; a < m; ++a) {
        cells.for_each_neighbor(a, [&](PointIndex b) { w[a * m + b] = edge_weight(cells, a, b); });
      }

      for (const Candidate& t2 : k2) {
        std::vector<double> col(m, 0.0);  // (A 1_T2)(a) mu(a)
        for (PointIndex a = 0; a < m; ++a) {
          for (PointIndex b : t2.cells) col[a] += w[a * m + b];
        }
        for (const Candidate& t1 : k1) {
          double cross = 0.0;
          for (PointIndex a : t1.cells) cross += col[a];
          const double total = t1.outside + t2.outside;
          bool better = !have || cross < best.cross - kTieTolerance;
          if (!better && have && std::abs(cross - best.cross) <= kTieTolerance) {
            better = total < best_total - kTieTolerance;
          }
          if (!better) continue;
          have = true;
          best_total = total;
          best.coords = coords;
          best.t1 = t1.cells;
          best.t2 = t2.cells;
          best.cross = cross;
        }
      }
    });
  }

  // Recompute diagnostics of the winner on the common code path.
  const PointFunction c1 = conditional_expectation(f1, best.coords);
  const PointFunction c2 = conditional_expectation(f2, best.coords);
  best.outside1 = outside_mass(c1, best.t1);
  best.outside2 = outside_mass(c2, best.t2);
  best.measure1 = cell_measure(c1.space(), best.t1);
  best.measure2 = cell_measure(c1.space(), best.t2);
  best.cross = cross_term(c1.space(), best.t1, best.t2);
  best.eps = eps;
  best.eta = 1.0;
  best.gamma = 0.0;
  return best;
}

OneSidedCapture one_sided_capture(const PointFunction& f1, const PointFunction& f2, double eps,
                                  const CaptureParams& params) {
  OneSidedCapture r;
  r.outcome = junta_capture(f1, f2, eps, params);
  const JuntaCapture& c = r.outcome.capture;
  r.coords = c.coords;
  r.measure1 = c.measure1;
  r.measure2 = c.measure2;
  if (r.outcome.status == CaptureStatus::kBudgetExceeded) {
    r.failure = "capture budget exceeded";
    return r;
  }
  constexpr double kSparse = 0.75;
  if (c.measure1 <= kSparse) {
    r.ok = true;
    r.side = 1;
    r.cells = c.t1;
  } else if (c.measure2 <= kSparse) {
    r.ok = true;
    r.side = 2;
    r.cells = c.t2;
  } else {
    r.failure = "neither side has measure at most 3/4";
  }
  return r;
}

IndependentCapture independent_junta_capture(const PointFunction& g, double eps,
                                             const CaptureParams& params, std::size_t mwis_cap) {
  IndependentCapture r;
  const CaptureOutcome outcome = junta_capture(g, g, eps, params);
  r.status = outcome.status;
  r.capture = outcome.capture;
  r.coords = outcome.capture.coords;
  r.unpruned = outcome.capture.t1;

  const PointFunction cond = conditional_expectation(g, r.coords);
  const ProductSpace& cells = cond.space();
  const SupportGraph graph = build_support_graph(cells, r.unpruned);
  std::vector<double> weights(graph.vertices.size());
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
    const PointIndex a = graph.vertices[i];
    weights[i] = cells.measure(a) * cond[a];
  }
  WeightedSet kept = max_weight_independent_set(graph, weights, mwis_cap);
  r.cells = std::move(kept.points);
  r.independent = is_independent(cells, r.cells);
  if (!r.independent) throw InvariantViolation("independent capture: pruned set is not independent");

  // Loss straight from g: sum over points whose J-projection misses T.
  const std::vector<PointIndex> proj = projection_table(g.space(), r.coords);
  std::vector<bool> in(cells.size(), false);
  for (PointIndex a : r.cells) in[a] = true;
  double loss = 0.0;
  for (PointIndex x = 0; x < g.size(); ++x) {
    if (!in[proj[x]]) loss += g.space().measure(x) * g[x];
  }
  r.loss = loss;
  for (PointIndex a : r.unpruned) {
    if (!in[a]) r.pruned_mass += cells.measure(a) * cond[a];
  }
  return r;
}

// lambda comes from a numerical eigensolve; the strict bound eta > 1 - lambda keeps a margin.
constexpr double kLambdaMargin = 1e-12;

bool noisy_gap_admissible(double eta, double lambda) {
  if (!(eta > 1.0 - lambda + kLambdaMargin && eta <= 1.0)) return false;
  const double t = 1.0 - eta;
  if (t == 0.0 || lambda == 0.0) return true;
  return t * (std::log(t) / std::log(lambda)) <= std::sqrt(t);
}

NoisyGap noisy_ip_gap(const PointFunction& f1, const PointFunction& f2, double eta) {
  require_same_space(f1, f2, "noisy_ip_gap");
  const ChainSpectrum spectrum = eigendecompose(f1.space().base());
  NoisyGap r;
  r.lambda = spectrum.lambda2;
  if (!(eta > 1.0 - r.lambda + kLambdaMargin && eta <= 1.0)) {
    throw DomainError("noisy_ip_gap: eta must lie in (1 - lambda, 1]");
  }
  r.bound = std::sqrt(1.0 - eta);
  r.condition_ok = noisy_gap_admissible(eta, r.lambda);
  if (eta == 1.0) return r;
  const PointFunction g1 = noise_operator(f1, eta);
  const PointFunction g2 = noise_operator(f2, eta);
  r.gap = std::abs(quad_form(f1, f2) - quad_form(g1, g2));
  return r;
}

LabelDensityReport label_density_check(const LabelMap& map, double eps) {
  if (!(map.p_exponent > 2.0)) throw DomainError("label density: p must exceed 2");
  const ProductSpace& cells = map.cells;
  if (map.labels.size() != cells.size()) throw DimensionError("label density: one label set per cell");
  for (const auto& l : map.labels) {
    if (l.size() > map.ell) throw DomainError("label density: label set larger than ell");
    if (!std::is_sorted(l.begin(), l.end()) ||
        std::adjacent_find(l.begin(), l.end()) != l.end()) {
      throw DomainError("label density: label sets must be sorted and distinct");
    }
  }

  LabelDensityReport r;
  const double ell2 = static_cast<double>(map.ell) * static_cast<double>(map.ell);
  const double expo = 2.0 * map.p_exponent / (map.p_exponent - 2.0);
  r.threshold = map.ell == 0 ? 0.0 : std::pow(eps / ell2, expo);

  auto meets = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i == *j) return true;
      if (*i < *j) ++i; else ++j;
    }
    return false;
  };
  for (PointIndex a = 0; a < cells.size(); ++a) {
    if (map.labels[a].empty()) continue;
    cells.for_each_neighbor(a, [&](PointIndex b) {
      if (meets(map.labels[a], map.labels[b])) r.pair_density += edge_weight(cells, a, b);
    });
  }

  std::vector<std::pair<std::size_t, double>> mass;  // (label, measure), label ascending
  for (PointIndex a = 0; a < cells.size(); ++a) {
    for (std::size_t l : map.labels[a]) mass.emplace_back(l, cells.measure(a));
  }
  std::sort(mass.begin(), mass.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t k = 0; k < mass.size();) {
    std::size_t e = k;
    double s = 0.0;
    while (e < mass.size() && mass[e].first == mass[k].first) s += mass[e++].second;
    if (!r.best_label || s > r.best_measure) {
      r.best_label = mass[k].first;
      r.best_measure = s;
    }
    k = e;
  }

  r.vacuous = r.pair_density < eps;
  r.holds = r.vacuous || r.best_measure >= r.threshold;
  return r;
}

FaithfulParameters faithful_parameters(double eps, double c, double lambda, std::optional<double> p) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("faithful parameters: eps must lie in (0, 1)");
  if (!(c > 0.0)) throw DomainError("faithful parameters: c must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("faithful parameters: lambda must lie in (0, 1)");
  if (p && !(*p > 2.0)) throw DomainError("faithful parameters: p must exceed 2");

  FaithfulParameters r;
  r.eps = eps;
  r.c = c;
  r.lambda = lambda;
  r.tau = std::pow(eps, c);
  r.delta_moo = std::pow(eps, c);

  double t = 0.5;
  auto ok = [&](double t) {
    const double eta = 1.0 - t;
    return eta > 1.0 - lambda && 2.0 * std::sqrt(t) <= r.delta_moo * eps / 2.0 &&
           noisy_gap_admissible(eta, lambda);
  };
  while (!ok(t)) {
    t /= 2.0;
    if (t < std::numeric_limits<double>::min()) throw NumericalError("faithful parameters: no admissible eta");
  }
  r.one_minus_eta = t;
  r.eta = 1.0 - t;
  // 1 - eta^2 = t (2 - t) stays accurate when t is tiny.
  const double one_minus_eta2 = t * (2.0 - t);
  const double inf_sum_bound = 1.0 / (one_minus_eta2 * one_minus_eta2);
  r.ell = 2.0 * inf_sum_bound / r.tau;
  if (p) {
    r.p = p;
    const double expo = 2.0 * *p / (*p - 2.0);
    // gamma = tau (eps / 2 ell^2)^expo / 2, in log10 to survive underflow.
    r.log10_gamma = std::log10(r.tau) + expo * (std::log10(eps / 2.0) - 2.0 * std::log10(r.ell)) -
                    std::log10(2.0);
    r.log10_j_bound = std::log10(2.0 * inf_sum_bound) - *r.log10_gamma;
  }
  return r;
}

}  // namespace removal
