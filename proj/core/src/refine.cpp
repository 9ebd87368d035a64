#include "removal/refine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace removal {

double phi(double x) {
  if (!(x >= 0.0)) throw DomainError("phi: argument must be nonnegative");
  return x == 0.0 ? 0.0 : x * std::log(x);
}

double entropy(const PointFunction& f, const CoordinateSet& coords) {
  const PointFunction cond = conditional_expectation(f, coords);
  double h = 0.0;
  for (PointIndex a = 0; a < cond.size(); ++a) h += cond.space().measure(a) * phi(cond[a]);
  return h;
}

PhiInequality check_phi_inequality(double lambda, double u, double v) {
  if (!(lambda >= 0.25 && lambda <= 1.0)) throw DomainError("phi inequality: lambda must lie in [1/4, 1]");
  if (!(u > 0.0 && v > 0.0)) throw DomainError("phi inequality: u and v must be positive");
  PhiInequality r;
  r.w = lambda * u + (1.0 - lambda) * v;
  if (!(u <= r.w / 2.0)) throw DomainError("phi inequality: requires u <= w / 2");
  r.lhs = lambda * phi(u) + (1.0 - lambda) * phi(v);
  r.rhs = phi(r.w) + r.w / 32.0;
  r.margin = r.lhs - r.rhs;
  r.holds = r.margin >= 0.0;
  return r;
}

namespace {

// Positions of `coords` inside the ascending complement `rest`.
CoordinateSet localize(const CoordinateSet& coords, const CoordinateSet& rest) {
  std::vector<std::size_t> local;
  for (std::size_t c : coords) {
    auto it = std::lower_bound(rest.begin(), rest.end(), c);
    local.push_back(static_cast<std::size_t>(it - rest.begin()));
  }
  return CoordinateSet(std::move(local));
}

CoordinateSet globalize(const CoordinateSet& local, const CoordinateSet& rest) {
  std::vector<std::size_t> out;
  for (std::size_t c : local) out.push_back(rest[c]);
  return CoordinateSet(std::move(out));
}

std::string shape_error(const PointFunction& f, std::size_t r, const RefinementWitness& w) {
  const std::size_t n = f.space().n();
  try {
    w.base.validate(n);
  } catch (const Error& e) {
    return e.what();
  }
  const std::size_t cells = checked_power(f.space().radix(), w.base.size(), f.space().point_cap());
  for (std::size_t k = 0; k < w.entries.size(); ++k) {
    const WitnessEntry& e = w.entries[k];
    if (e.cell >= cells) return "witness cell out of range";
    if (k > 0 && !(w.entries[k - 1].cell < e.cell)) return "witness cells must be ascending and distinct";
    try {
      e.coords.validate(n);
    } catch (const Error& err) {
      return err.what();
    }
    if (!e.coords.is_disjoint_from(w.base)) return "J_x must be disjoint from I";
    if (e.coords.size() > r) return "J_x larger than r";
    const std::size_t sub = checked_power(f.space().radix(), e.coords.size(), f.space().point_cap());
    for (std::size_t i = 0; i < e.cells.size(); ++i) {
      if (e.cells[i] >= sub) return "T_x cell out of range";
      if (i > 0 && !(e.cells[i - 1] < e.cells[i])) return "T_x must be ascending and distinct";
    }
  }
  return {};
}

}  // namespace

WitnessDiagnostics verify_witness(const PointFunction& f, std::size_t r, const RefinementWitness& w) {
  WitnessDiagnostics d;
  try {
    d.shape_error = shape_error(f, r, w);
  } catch (const Error& e) {
    d.shape_error = e.what();
  }
  if (!d.shape_error.empty()) return d;

  const std::size_t n = f.space().n();
  d.alpha = f.expectation();
  const PointFunction cond = conditional_expectation(f, w.base);
  for (const WitnessEntry& e : w.entries) d.covered += cond.space().measure(e.cell) * cond[e.cell];
  d.covered_ok = d.covered >= d.alpha / 2.0 - kWitnessTolerance;

  const CoordinateSet rest = w.base.complement(n);
  bool all_ok = true;
  d.worst_sparse_slack = 0.75;
  d.worst_outside_slack = d.alpha / 8.0;
  for (const WitnessEntry& e : w.entries) {
    EntryDiagnostics ed;
    ed.cell = e.cell;
    const PointFunction h = restrict(f, w.base, e.cell);
    const PointFunction sub = conditional_expectation(h, localize(e.coords, rest));
    std::vector<bool> in(sub.size(), false);
    for (PointIndex y : e.cells) in[y] = true;
    double pr_out = 0.0;
    double mass_out = 0.0;
    for (PointIndex y = 0; y < sub.size(); ++y) {
      const double m = sub.space().measure(y);
      if (in[y]) {
        ed.pr_inside += m;
      } else {
        pr_out += m;
        mass_out += m * sub[y];
      }
    }
    ed.outside_mean = pr_out > 0.0 ? mass_out / pr_out : 0.0;
    ed.sparse_ok = ed.pr_inside <= 0.75 + kWitnessTolerance;
    ed.outside_ok = ed.outside_mean <= d.alpha / 8.0 + kWitnessTolerance;
    d.worst_sparse_slack = std::min(d.worst_sparse_slack, 0.75 - ed.pr_inside);
    d.worst_outside_slack = std::min(d.worst_outside_slack, d.alpha / 8.0 - ed.outside_mean);
    all_ok = all_ok && ed.sparse_ok && ed.outside_ok;
    d.entries.push_back(ed);
  }
  d.accepted = d.covered_ok && all_ok;
  return d;
}

RefinementSearch find_refinement(const PointFunction& f, const CoordinateSet& coords, std::size_t r,
                                 double eps, const CaptureParams& params) {
  const std::size_t n = f.space().n();
  coords.validate(n);
  if (!(eps > 0.0)) throw DomainError("find_refinement: eps must be positive");

  RefinementSearch out;
  out.candidate.base = coords;
  const ProductSpace cells = f.space().with_dimension(coords.size());
  const CoordinateSet rest = coords.complement(n);
  CaptureParams cp = params;
  cp.j_budget = r;

  std::map<PointIndex, PointFunction> restricted;
  auto slice = [&](PointIndex x) -> const PointFunction& {
    auto it = restricted.find(x);
    if (it == restricted.end()) it = restricted.emplace(x, restrict(f, coords, x)).first;
    return it->second;
  };

  std::vector<bool> in_s(cells.size(), false);
  for (PointIndex x1 = 0; x1 < cells.size(); ++x1) {
    cells.for_each_neighbor(x1, [&](PointIndex x2) {
      if (x2 < x1 || in_s[x1] || in_s[x2]) return;
      ++out.edges_visited;
      ++out.captures_run;
      const OneSidedCapture cap = one_sided_capture(slice(x1), slice(x2), eps / 32.0, cp);
      if (!cap.ok) {
        if (cap.outcome.status == CaptureStatus::kBudgetExceeded) {
          ++out.budget_failures;
        } else {
          ++out.soft_failures;
        }
        return;
      }
      const PointIndex chosen = cap.side == 1 ? x1 : x2;
      in_s[chosen] = true;
      out.candidate.entries.push_back(WitnessEntry{chosen, globalize(cap.coords, rest), cap.cells});
    });
  }
  std::sort(out.candidate.entries.begin(), out.candidate.entries.end(),
            [](const WitnessEntry& a, const WitnessEntry& b) { return a.cell < b.cell; });

  out.diagnostics = verify_witness(f, r, out.candidate);
  if (out.diagnostics.accepted && !out.candidate.entries.empty()) out.witness = out.candidate;
  return out;
}

const char* to_string(RefinementStop s) {
  switch (s) {
    case RefinementStop::kNoWitness: return "no-witness";
    case RefinementStop::kFullCoordinates: return "full-coordinates";
    case RefinementStop::kMaxSteps: return "max-steps";
  }
  return "?";
}

std::size_t refinement_step_bound(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) return 0;
  return static_cast<std::size_t>(std::ceil(128.0 * std::log(1.0 / alpha)));
}

RefinementTrace refinement_loop(const PointFunction& f, std::size_t r, double eps, std::size_t max_steps,
                                const CaptureParams& params) {
  if (f.range() != Range::kUnit) throw DomainError("refinement_loop needs a [0,1] function");
  RefinementTrace t;
  t.alpha = f.expectation();
  t.step_bound = refinement_step_bound(t.alpha);
  if (max_steps == 0) max_steps = t.step_bound + 2;
  const std::size_t n = f.space().n();
  const double required = t.alpha / 128.0 - kEntropyGainTolerance;

  CoordinateSet current;
  double h = entropy(f, current);
  for (std::size_t step = 0;; ++step) {
    RefinementStep rec;
    rec.step = step;
    rec.coords = current;
    rec.entropy = h;
    if (current.size() == n) {
      t.steps.push_back(rec);
      t.stop = RefinementStop::kFullCoordinates;
      break;
    }
    if (t.accepted_steps >= max_steps) {
      t.steps.push_back(rec);
      t.stop = RefinementStop::kMaxSteps;
      break;
    }
    const RefinementSearch search = find_refinement(f, current, r, eps, params);
    if (!search.witness) {
      t.steps.push_back(rec);
      t.stop = RefinementStop::kNoWitness;
      break;
    }
    CoordinateSet next = current;
    for (const WitnessEntry& e : search.witness->entries) next = next.unite(e.coords);
    const double h_next = entropy(f, next);
    rec.accepted = true;
    rec.gain = h_next - h;
    t.steps.push_back(rec);
    if (rec.gain < required) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "refinement step " << step << ": entropy gain " << rec.gain << " below alpha/128 = "
          << t.alpha / 128.0;
      throw InvariantViolation(msg.str());
    }
    ++t.accepted_steps;
    if (t.accepted_steps > t.step_bound) {
      throw InvariantViolation("refinement loop exceeded ceil(128 ln(1/alpha)) accepted steps");
    }
    current = std::move(next);
    h = h_next;
  }
  t.final_coords = current;
  t.final_entropy = h;
  return t;
}

std::string to_string(const Magnitude& m) {
  if (m.astronomical) return "astronomical(>1e300)";
  std::ostringstream s;
  s.precision(17);
  s << m.value;
  return s.str();
}

Magnitude gamma_step(const Magnitude& l, std::size_t r, std::size_t radix) {
  if (r == 0) throw DomainError("Gamma: r must be positive");
  if (radix < 2) throw DomainError("Gamma: |V| must be at least 2");
  if (l.astronomical) return l;
  const double log10_term = std::log10(static_cast<double>(r)) + l.value * std::log10(static_cast<double>(radix));
  if (log10_term > 300.0) return Magnitude{0.0, true};
  const double v = l.value + static_cast<double>(r) * std::pow(static_cast<double>(radix), l.value);
  if (v > kAstronomical) return Magnitude{0.0, true};
  return Magnitude{v, false};
}

Magnitude tower(std::size_t t) {
  double v = 1.0;
  for (std::size_t i = 0; i < t; ++i) {
    if (v * std::log10(2.0) > 300.0) return Magnitude{0.0, true};
    v = std::exp2(v);
  }
  return Magnitude{v, false};
}

double delta2(double w_min, double k, double eps, double c) {
  return std::pow(w_min, k) * std::pow(eps / 32.0, c);
}

ParameterSchedule schedule(double c, double eps, double alpha, std::size_t r, const BaseChain& base) {
  if (!(c > 0.0)) throw DomainError("schedule: c must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("schedule: eps must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("schedule: alpha must lie in (0, 1]");
  ParameterSchedule s;
  s.c = c;
  s.eps = eps;
  s.alpha = alpha;
  s.r = r;
  s.radix = base.size();
  s.w_min = base.w_min();
  s.delta1 = std::pow(eps, c);
  s.j1 = std::pow(eps, -c);
  s.r1 = s.j1;
  s.r2 = std::pow(eps / 32.0, -c);
  s.compositions = refinement_step_bound(alpha);

  Magnitude l{0.0, false};
  s.gamma_iterates.push_back(l);
  for (std::size_t i = 0; i < s.compositions; ++i) {
    l = gamma_step(l, r, s.radix);
    s.gamma_iterates.push_back(l);
    if (l.astronomical) break;
  }
  s.k = l;
  if (!s.k.astronomical) {
    s.log10_delta2 = s.k.value * std::log10(s.w_min) + c * std::log10(eps / 32.0);
    s.delta2 = delta2(s.w_min, s.k.value, eps, c);
  }
  return s;
}

}  // namespace removal
