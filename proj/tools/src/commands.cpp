#include "removal/cli/commands.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "removal/cli/io.hpp"
#include "removal/independent.hpp"
#include "removal/junta.hpp"
#include "removal/kneser.hpp"
#include "removal/random.hpp"
#include "removal/refine.hpp"
#include "removal/verify/oracles.hpp"
#include "removal/verify/suites.hpp"

namespace removal::cli {

namespace {

using Json = nlohmann::ordered_json;

// Keys every command accepts; the flags write into these too.
const std::vector<std::string> kCommonKeys{"command", "seed", "mode", "cap_points", "cap_mwis"};

std::vector<std::string> keys(std::initializer_list<const char*> extra) {
  std::vector<std::string> k = kCommonKeys;
  for (const char* e : extra) k.emplace_back(e);
  return k;
}

std::vector<std::size_t> as_sizes(const std::vector<PointIndex>& v) { return {v.begin(), v.end()}; }

void recheck(const std::string& what, double reported, double recomputed) {
  if (!(std::abs(reported - recomputed) <= kRecheckTolerance)) {
    throw InvariantViolation("recheck of " + what + " failed: reported " + format_real(reported) +
                             ", recomputed " + format_real(recomputed));
  }
}

std::string after_colon(const std::string& source, const std::string& prefix) {
  return source.substr(prefix.size());
}

std::shared_ptr<const BaseChain> chain_of(const Context& ctx) {
  if (!ctx.chain) ctx.chain = load_chain(ctx.cfg.string("chain", "builtin:k3"), ctx.cfg.base_dir());
  return ctx.chain;
}

// A function file names its own chain; an identical transition matrix joins the run's chain.
PointFunction adopt(const Context& ctx, const PointFunction& f) {
  if (!ctx.chain) {
    ctx.chain = f.space().base_ptr();
    return f;
  }
  if (ctx.chain == f.space().base_ptr() || ctx.chain->transition() != f.space().base().transition()) return f;
  ProductSpace sp(ctx.chain, f.space().n(), ctx.cap_points);
  return PointFunction(sp, std::vector<double>(f.values().begin(), f.values().end()), f.range());
}

ProductSpace space_of(const Context& ctx) {
  return ProductSpace(chain_of(ctx), ctx.cfg.count("n", 3), ctx.cap_points);
}

// "random", "random:<zero probability>", "dictatorship:<coordinate>", "constant:<value>",
// "indicator:<i>,<j>,...", or a function file path.
PointFunction function_from_spec(const Context& ctx, const std::string& source, Rng& rng) {
  if (source == "random" || source.rfind("random:", 0) == 0) {
    const double zero = source == "random" ? 0.0 : parse_real(after_colon(source, "random:"), "function '" + source + "'");
    if (!(zero >= 0.0 && zero <= 1.0)) throw ConfigError("function '" + source + "': probability outside [0, 1]");
    return verify::random_unit_function(space_of(ctx), rng, zero);
  }
  if (source.rfind("dictatorship:", 0) == 0) {
    const ProductSpace sp = space_of(ctx);
    const double c = parse_real(after_colon(source, "dictatorship:"), "function '" + source + "'");
    if (!(c >= 0 && c < static_cast<double>(sp.n()) && c == std::floor(c))) {
      throw ConfigError("function '" + source + "': coordinate outside [0, n)");
    }
    std::vector<double> v(sp.size());
    for (PointIndex x = 0; x < sp.size(); ++x) v[x] = sp.digits(x)[static_cast<std::size_t>(c)] == 0 ? 1.0 : 0.0;
    return PointFunction(sp, std::move(v));
  }
  if (source.rfind("constant:", 0) == 0) {
    const double c = parse_real(after_colon(source, "constant:"), "function '" + source + "'");
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("function '" + source + "': value outside [0, 1]");
    return PointFunction::constant(space_of(ctx), c);
  }
  if (source.rfind("indicator:", 0) == 0) {
    const ProductSpace sp = space_of(ctx);
    std::vector<PointIndex> pts;
    std::stringstream ss(after_colon(source, "indicator:"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const double v = parse_real(tok, "function '" + source + "'");
      if (!(v >= 0 && v < static_cast<double>(sp.size()) && v == std::floor(v))) {
        throw ConfigError("function '" + source + "': point index outside the space");
      }
      pts.push_back(static_cast<PointIndex>(v));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return PointFunction::indicator(sp, pts);
  }
  std::filesystem::path p(source);
  if (p.is_relative()) p = std::filesystem::path(ctx.cfg.base_dir()) / p;
  return adopt(ctx, load_function(p.string(), ctx.cap_points));
}

PointFunction function_of(const Context& ctx, const std::string& key, Rng& rng,
                          const std::string& fallback = "random") {
  return function_from_spec(ctx, ctx.cfg.string(key, fallback), rng);
}

void describe_space(Report& rep, const ProductSpace& sp) {
  rep.add("space.states", sp.radix());
  rep.add("space.n", sp.n());
  rep.add("space.points", sp.size());
}

CaptureParams capture_params(const Context& ctx) {
  CaptureParams p;
  p.eta = ctx.cfg.real_in("eta", p.eta, 0.0, 1.0, false, true);
  p.gamma = ctx.cfg.real_in("gamma", p.gamma, 0.0, 1.0);
  p.j_budget = ctx.cfg.count("j_budget", p.j_budget);
  p.cross_target = ctx.cfg.real("cross_target", p.cross_target);
  p.gamma_floor = ctx.cfg.real_in("gamma_floor", p.gamma_floor, 0.0, 1.0);
  p.mode = ctx.mode;
  return p;
}

void report_params(Report& rep, const CaptureParams& p) {
  rep.add("params.mode", to_string(p.mode));
  rep.add_real("params.eta", p.eta);
  rep.add_real("params.gamma", p.gamma);
  rep.add("params.j_budget", p.j_budget);
  rep.add_real("params.cross_target", p.cross_target);
  rep.add_real("params.gamma_floor", p.gamma_floor);
}

// Faithful mode: the parameter trail of the existential construction, never executed.
int report_faithful(Context& ctx, double eps, double lambda) {
  const double c = ctx.cfg.real_in("c", 1.0, 0.0, 1e6);
  const double p = ctx.cfg.real_in("p_exponent", 4.0, 2.0, 1e6);
  const FaithfulParameters fp = faithful_parameters(eps, c, lambda, p);
  Report& rep = ctx.rep;
  rep.section("faithful");
  rep.add("status", "parameter trail only; the construction is not run");
  rep.add_real("eps", fp.eps);
  rep.add_real("c", fp.c);
  rep.add_real("lambda", fp.lambda);
  rep.add_real("tau", fp.tau);
  rep.add_real("delta_moo", fp.delta_moo);
  rep.add_real("one_minus_eta", fp.one_minus_eta);
  rep.add_real("eta", fp.eta);
  rep.add_real("ell", fp.ell);
  rep.add_real("p_exponent", p);
  if (fp.log10_gamma) rep.add_real("log10_gamma", *fp.log10_gamma);
  if (fp.log10_j_bound) rep.add_real("log10_j_bound", *fp.log10_j_bound);
  rep.section("");
  return kExitOk;
}

// Outside mass E[1_{x_J not in T} f(x)], summed over every point of V^n.
double outside_direct(const PointFunction& f, const CoordinateSet& coords, const std::vector<PointIndex>& t) {
  const std::set<PointIndex> in(t.begin(), t.end());
  const auto proj = projection_table(f.space(), coords);
  double s = 0.0;
  for (PointIndex x = 0; x < f.size(); ++x) {
    if (!in.count(proj[x])) s += f.space().measure(x) * f[x];
  }
  return s;
}

double expectation_direct(const PointFunction& f) {
  double s = 0.0;
  for (PointIndex x = 0; x < f.size(); ++x) s += f.space().measure(x) * f[x];
  return s;
}

double entropy_direct(const PointFunction& f, const CoordinateSet& coords) {
  const auto cond = verify::conditional_expectation_direct(f, coords);
  const ProductSpace cells = f.space().with_dimension(coords.size());
  double h = 0.0;
  for (PointIndex a = 0; a < cells.size(); ++a) {
    const double m = cond[a];
    if (m > 0.0) h += cells.measure(a) * m * std::log(m);
  }
  return h;
}

void write_side_file(const Context& ctx, const std::string& name, const PointFunction& f) {
  if (!ctx.out_dir) return;
  save_function((std::filesystem::path(*ctx.out_dir) / name).string(), ctx.cfg.string("chain", "builtin:k3"), f);
  ctx.rep.add("output." + name, name);
}

// ---------------------------------------------------------------------------------------------

int cmd_validate_chain(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain"}));
  const std::string source = ctx.cfg.string("chain", "builtin:k3");
  ChainInput in = load_chain_matrix(source, ctx.cfg.base_dir());
  Report& rep = ctx.rep;
  rep.add("chain", source);
  rep.add("states", in.transition.rows());
  try {
    const BaseChain c = validate_chain(in.transition, in.labels);
    rep.add("valid", true);
    rep.add("labels", c.labels());
    std::vector<double> pi(c.stationary().data(), c.stationary().data() + c.size());
    rep.add("stationary", pi);
    rep.add_real("w_min", c.w_min());
    const ChainSpectrum s = eigendecompose(c);
    rep.add("eigenvalues", s.eigenvalues);
    rep.add_real("lambda2", s.lambda2);
    rep.add("period", chain_period(c.transition()));
    const Vector iter = stationary_power_iteration(c.transition());
    for (std::size_t i = 0; i < c.size(); ++i) {
      recheck("stationary[" + std::to_string(i) + "]", pi[i], iter(static_cast<Eigen::Index>(i)));
    }
    return kExitOk;
  } catch (const ChainError& e) {
    rep.add("valid", false);
    rep.add("violation", to_string(e.kind()));
    rep.add("witness", std::vector<std::size_t>{e.first(), e.second()});
    rep.add("detail", e.what());
    ctx.message = "chain is not valid";
    return kExitSoftFailure;
  }
}

int cmd_quadform(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain", "n", "f", "g"}));
  Rng rng(ctx.seed);
  const PointFunction f = function_of(ctx, "f", rng);
  const PointFunction g = function_of(ctx, "g", rng);
  require_same_space(f, g, "quadform");
  Report& rep = ctx.rep;
  describe_space(rep, f.space());
  const double q = quad_form(f, g);
  rep.add_real("quad_form", q);
  rep.add_real("inner_product", inner_product(f, g));
  rep.add_real("expectation.f", f.expectation());
  rep.add_real("expectation.g", g.expectation());

  const auto fe = fourier_expand(f);
  const auto ge = fourier_expand(g, fe.spectrum());
  double spectral = 0.0;
  for (PointIndex s = 0; s < f.size(); ++s) spectral += fe.lambda(s) * fe[s] * ge[s];
  recheck("quad_form", q, spectral);
  return kExitOk;
}

int cmd_decompose(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain", "n", "function"}));
  Rng rng(ctx.seed);
  const PointFunction g = function_of(ctx, "function", rng);
  Report& rep = ctx.rep;
  describe_space(rep, g.space());
  const MatchingLikeResult d = matching_like_decompose(g);
  const MatchingLikeCheck chk = is_matching_like(d.f, ctx.cap_mwis);
  rep.add_real("expectation.g", g.expectation());
  rep.add_real("expectation.f", d.f.expectation());
  rep.add("residual.size", d.residual_set.size());
  rep.add("residual.points", as_sizes(d.residual_set));
  rep.add("augmentations", d.trace.size());
  rep.add("matching_like", chk.matching_like);
  rep.add_real("worst_mass", chk.worst_mass);
  rep.add_real("half_expectation", chk.half_expectation);
  rep.add_real("slack", chk.slack);
  write_side_file(ctx, "decomposed.fn", d.f);

  for (PointIndex x = 0; x < g.size(); ++x) {
    if (d.f[x] > g[x]) throw InvariantViolation("decompose: f exceeds g at point " + std::to_string(x));
  }
  if (!is_independent(g.space(), d.residual_set)) throw InvariantViolation("decompose: residual set not independent");
  if (!chk.matching_like) throw InvariantViolation("decompose: output is not matching-like");
  recheck("expectation.f", d.f.expectation(), expectation_direct(d.f));
  double worst = 0.0;
  for (PointIndex x : chk.worst_set) worst += g.space().measure(x) * d.f[x];
  recheck("worst_mass", chk.worst_mass, worst);
  return kExitOk;
}

int cmd_far(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain", "n", "function", "eps"}));
  Rng rng(ctx.seed);
  const PointFunction g = function_of(ctx, "function", rng);
  const double eps = ctx.cfg.real_in("eps", 0.1, 0.0, 1.0, true, true);
  Report& rep = ctx.rep;
  describe_space(rep, g.space());
  rep.add_real("eps", eps);
  const FarnessResult r = eps_far_from_independent(g, eps, ctx.cap_mwis);
  rep.add("far", r.far);
  rep.add_real("expectation", r.expectation);
  rep.add_real("best_captured", r.best_captured);
  rep.add_real("uncaptured", r.uncaptured);
  rep.add("witness", as_sizes(r.witness));

  if (!is_independent(g.space(), r.witness)) throw InvariantViolation("far: witness is not independent");
  double captured = 0.0;
  for (PointIndex x : r.witness) captured += g.space().measure(x) * g[x];
  recheck("best_captured", r.best_captured, captured);
  recheck("expectation", r.expectation, expectation_direct(g));
  return kExitOk;
}

int cmd_refine(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain", "n", "function", "r", "eps", "max_steps", "eta", "gamma", "j_budget",
                               "cross_target", "gamma_floor", "c", "p_exponent"}));
  Rng rng(ctx.seed);
  const PointFunction f = function_of(ctx, "function", rng);
  const std::size_t r = ctx.cfg.count("r", 1);
  const double eps = ctx.cfg.real_in("eps", 0.1, 0.0, 1.0, false, true);
  const std::size_t max_steps = ctx.cfg.count("max_steps", 0);
  if (r == 0) throw ConfigError(ctx.cfg.origin() + ": field 'r': must be positive");
  Report& rep = ctx.rep;
  describe_space(rep, f.space());
  rep.add("r", r);
  rep.add_real("eps", eps);
  const CaptureParams params = capture_params(ctx);
  if (ctx.mode == CaptureMode::kFaithful) return report_faithful(ctx, eps / 32, eigendecompose(f.space().base()).lambda2);
  report_params(rep, params);

  const RefinementTrace t = refinement_loop(f, r, eps, max_steps, params);
  rep.add_real("alpha", t.alpha);
  rep.add("step_bound", t.step_bound);
  for (const auto& s : t.steps) {
    rep.section("step" + std::to_string(s.step));
    rep.add("coords", s.coords.items());
    rep.add_real("entropy", s.entropy);
    rep.add("accepted", s.accepted);
    if (s.accepted) rep.add_real("gain", s.gain);
    recheck("entropy at step " + std::to_string(s.step), s.entropy, entropy_direct(f, s.coords));
  }
  rep.section("");
  rep.add("accepted_steps", t.accepted_steps);
  rep.add("stop", to_string(t.stop));
  rep.add("final.coords", t.final_coords.items());
  rep.add_real("final.entropy", t.final_entropy);
  recheck("final entropy", t.final_entropy, entropy_direct(f, t.final_coords));
  if (t.stop != RefinementStop::kMaxSteps) return kExitOk;
  ctx.message = "step limit reached";
  return kExitSoftFailure;
}

void report_capture(Report& rep, const JuntaCapture& c) {
  rep.add("J", c.coords.items());
  rep.add("T1", as_sizes(c.t1));
  rep.add("T2", as_sizes(c.t2));
  rep.add_real("outside1", c.outside1);
  rep.add_real("outside2", c.outside2);
  rep.add_real("cross", c.cross);
  rep.add_real("measure1", c.measure1);
  rep.add_real("measure2", c.measure2);
  rep.add_real("gamma", c.gamma);
  rep.add("gamma_halvings", c.gamma_halvings);
}

int cmd_capture(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain", "n", "f1", "f2", "eps", "eta", "gamma", "j_budget", "cross_target",
                               "gamma_floor", "c", "p_exponent"}));
  Rng rng(ctx.seed);
  const PointFunction f1 = function_of(ctx, "f1", rng);
  const PointFunction f2 = ctx.cfg.has("f2") ? function_of(ctx, "f2", rng) : f1;
  require_same_space(f1, f2, "capture");
  const double eps = ctx.cfg.real_in("eps", 0.1, 0.0, 1.0, false, true);
  Report& rep = ctx.rep;
  describe_space(rep, f1.space());
  rep.add_real("eps", eps);
  if (ctx.mode == CaptureMode::kFaithful) return report_faithful(ctx, eps, eigendecompose(f1.space().base()).lambda2);
  const CaptureParams params = capture_params(ctx);
  report_params(rep, params);

  const CaptureOutcome out = junta_capture(f1, f2, eps, params);
  rep.add("capture_status", out.status == CaptureStatus::kOk ? "ok" : "budget-exceeded");
  report_capture(rep, out.capture);

  const JuntaCapture& c = out.capture;
  recheck("outside1", c.outside1, outside_direct(f1, c.coords, c.t1));
  recheck("outside2", c.outside2, outside_direct(f2, c.coords, c.t2));
  const ProductSpace cells = f1.space().with_dimension(c.coords.size());
  const auto i1 = PointFunction::indicator(cells, c.t1);
  const auto i2 = PointFunction::indicator(cells, c.t2);
  recheck("cross", c.cross, verify::quad_form_double_sum(cells, i1.values(), i2.values()));
  if (out.status == CaptureStatus::kOk) return kExitOk;
  ctx.message = "|J| budget exceeded at the starting gamma";
  return kExitSoftFailure;
}

int cmd_independent_capture(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain", "n", "function", "eps", "eta", "gamma", "j_budget", "cross_target",
                               "gamma_floor", "c", "p_exponent"}));
  Rng rng(ctx.seed);
  const PointFunction g = function_of(ctx, "function", rng);
  const double eps = ctx.cfg.real_in("eps", 0.1, 0.0, 1.0, false, true);
  Report& rep = ctx.rep;
  describe_space(rep, g.space());
  rep.add_real("eps", eps);
  if (ctx.mode == CaptureMode::kFaithful) return report_faithful(ctx, eps, eigendecompose(g.space().base()).lambda2);
  const CaptureParams params = capture_params(ctx);
  report_params(rep, params);

  const IndependentCapture r = independent_junta_capture(g, eps, params, ctx.cap_mwis);
  rep.add("capture_status", r.status == CaptureStatus::kOk ? "ok" : "budget-exceeded");
  rep.add("J", r.coords.items());
  rep.add("T_unpruned", as_sizes(r.unpruned));
  rep.add("T", as_sizes(r.cells));
  rep.add("independent", r.independent);
  rep.add_real("loss", r.loss);
  rep.add_real("pruned_mass", r.pruned_mass);
  rep.add_real("capture.outside", r.capture.outside1);

  const ProductSpace cells = g.space().with_dimension(r.coords.size());
  if (!is_independent(cells, r.cells)) throw InvariantViolation("independent-capture: T is not independent");
  recheck("loss", r.loss, outside_direct(g, r.coords, r.cells));
  if (r.status == CaptureStatus::kOk) return kExitOk;
  ctx.message = "|J| budget exceeded at the starting gamma";
  return kExitSoftFailure;
}

// "star:<e>", "perturbed-star:<e>", "constant:<v>", "random", or a layer file path.
LayerFunction layer_of(const Context& ctx, Rng& rng) {
  const std::string source = ctx.cfg.string("layer", "star:0");
  const std::size_t n = ctx.cfg.count("n", 9);
  const std::size_t k = ctx.cfg.count("k", 3);
  auto element = [&](const std::string& prefix) {
    const double e = parse_real(after_colon(source, prefix), "layer '" + source + "'");
    if (!(e >= 0 && e < static_cast<double>(n) && e == std::floor(e))) {
      throw ConfigError("layer '" + source + "': element outside [0, n)");
    }
    return static_cast<std::size_t>(e);
  };
  if (source.rfind("star:", 0) == 0) return LayerFunction::star(n, k, element("star:"));
  if (source.rfind("perturbed-star:", 0) == 0) {
    const LayerFunction star = LayerFunction::star(n, k, element("perturbed-star:"));
    std::vector<double> v(star.values().begin(), star.values().end());
    std::vector<std::size_t> off;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == 0.0) off.push_back(i);
    const std::size_t flips =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.01 * static_cast<double>(off.size()))));
    for (std::size_t i = 0; i < flips && !off.empty(); ++i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(off.size()));
      v[off[j]] = 1.0;
      off.erase(off.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return LayerFunction(n, k, std::move(v));
  }
  if (source.rfind("constant:", 0) == 0) {
    const double c = parse_real(after_colon(source, "constant:"), "layer '" + source + "'");
    return LayerFunction::constant(n, k, c);
  }
  if (source == "random") return verify::random_layer_function(n, k, rng);
  std::filesystem::path p(source);
  if (p.is_relative()) p = std::filesystem::path(ctx.cfg.base_dir()) / p;
  return load_layer(p.string());
}

int cmd_kneser(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"layer", "n", "k", "p", "eps", "eta", "gamma", "j_budget", "cross_target",
                               "gamma_floor", "c", "p_exponent"}));
  Rng rng(ctx.seed);
  const LayerFunction f = layer_of(ctx, rng);
  const double p = ctx.cfg.has("p") ? ctx.cfg.real_in("p", 0.25, 0.0, 0.5)
                                    : static_cast<double>(f.k()) / static_cast<double>(f.n());
  try {
    require_layer_ratio(f.n(), f.k(), p);
  } catch (const DomainError& e) {
    throw ConfigError(ctx.cfg.origin() + ": " + e.what());
  }
  const double eps = ctx.cfg.real_in("eps", 0.05, 0.0, 1.0, false, true);
  CaptureParams params = capture_params(ctx);
  if (!ctx.cfg.has("eta")) params.eta = 0.95;
  Report& rep = ctx.rep;
  rep.add("layer.n", f.n());
  rep.add("layer.k", f.k());
  rep.add_real("p", p);
  rep.add_real("eps", eps);
  if (ctx.mode == CaptureMode::kFaithful) return report_faithful(ctx, eps, p / (1.0 - p));
  report_params(rep, params);

  const KneserCapture r = kneser_capture(f, eps, p, params, ctx.cap_mwis);
  rep.add_real("edge.ordered", r.edge.ordered);
  rep.add_real("edge.unordered", r.edge.unordered);
  rep.add_real("edge.lifted", r.edge_lifted);
  rep.add_real("c_constant", c_constant(p, f.n()));
  rep.add("capture_status", r.capture.status == CaptureStatus::kOk ? "ok" : "budget-exceeded");
  rep.add("J", r.coords.items());
  rep.add("T", std::vector<std::uint64_t>(r.family.begin(), r.family.end()));
  rep.add("intersecting", r.intersecting);
  rep.add_real("loss", r.loss);
  rep.add_real("loss_bound", r.loss_bound);
  rep.add("loss_ok", r.loss_ok);
  rep.add_real("cube_loss", r.cube_loss);

  // Loss read straight off the layer table: project each k-set onto J.
  const std::set<SubsetMask> family(r.family.begin(), r.family.end());
  double loss = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const SubsetMask m = f.masks()[i];
    SubsetMask w = 0;
    for (std::size_t j = 0; j < r.coords.size(); ++j)
      if ((m >> r.coords[j]) & 1) w |= SubsetMask{1} << j;
    if (!family.count(w)) loss += f[i];
  }
  loss /= binomial(f.n(), f.k());
  recheck("loss", r.loss, loss);
  if (!is_intersecting(r.family)) throw InvariantViolation("kneser: T is not intersecting");
  if (f.size() <= 4000) recheck("edge", r.edge.ordered, verify::edge_layer_pairs(f));
  if (r.capture.status != CaptureStatus::kOk) {
    ctx.message = "|J| budget exceeded at the starting gamma";
    return kExitSoftFailure;
  }
  if (!r.loss_ok) {
    ctx.message = "layer loss above 5 eps";
    return kExitSoftFailure;
  }
  return kExitOk;
}

int cmd_sweep(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"suites"}));
  const auto& all = verify::all_suites();
  std::vector<std::string> ids;
  for (const auto& s : all) ids.push_back(s.id);
  const auto wanted = ctx.cfg.strings("suites", ids);
  for (const auto& w : wanted) {
    if (std::find(ids.begin(), ids.end(), w) == ids.end()) {
      throw ConfigError(ctx.cfg.origin() + ": field 'suites': unknown suite '" + w + "'");
    }
  }
  Report& rep = ctx.rep;
  bool all_pass = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (std::find(wanted.begin(), wanted.end(), all[i].id) == wanted.end()) continue;
    // Same per-suite seed offsets as the acceptance runner.
    const verify::SuiteReport s = all[i].run(ctx.seed + i + 1);
    rep.section("suite." + s.id);
    rep.add("pass", s.pass);
    rep.add("lines", s.lines);
    rep.add("failures", s.failures);
    all_pass = all_pass && s.pass;
    if (ctx.out_dir) {
      std::ofstream((std::filesystem::path(*ctx.out_dir) / (s.id + ".txt")).string()) << s.body();
    }
  }
  rep.section("");
  rep.add("all_pass", all_pass);
  if (!all_pass) ctx.message = "one or more suites failed";
  return all_pass ? kExitOk : kExitInvariant;
}

struct OracleResult {
  double deviation = 0.0;
  double tolerance = 0.0;
  std::size_t comparisons = 0;
};

int cmd_oracle_compare(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"oracle", "chain", "n", "trials", "zero_probability", "eta", "layer_n", "layer_k"}));
  const std::string oracle = ctx.cfg.string("oracle", "quadform");
  const std::size_t trials = ctx.cfg.count("trials", 20);
  const double zero = ctx.cfg.real_in("zero_probability", 0.0, 0.0, 1.0, true, true);
  Rng rng(ctx.seed);
  Report& rep = ctx.rep;
  rep.add("oracle", oracle);
  rep.add("trials", trials);
  OracleResult res;
  auto track = [&](double a, double b) {
    res.deviation = std::max(res.deviation, std::abs(a - b));
    ++res.comparisons;
  };

  if (oracle == "edge-layer") {
    const std::size_t n = ctx.cfg.count("layer_n", 8);
    const std::size_t k = ctx.cfg.count("layer_k", 2);
    res.tolerance = 1e-12;
    for (std::size_t t = 0; t < trials; ++t) {
      const LayerFunction f = verify::random_layer_function(n, k, rng);
      track(edge_layer(f).ordered, verify::edge_layer_pairs(f));
    }
  } else {
    const ProductSpace sp = space_of(ctx);
    describe_space(rep, sp);
    if (oracle == "quadform") {
      res.tolerance = 1e-12;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto f = verify::random_values(sp.size(), rng, zero);
        const auto g = verify::random_values(sp.size(), rng, zero);
        track(quad_form(sp, f, g), verify::quad_form_double_sum(sp, f, g));
      }
    } else if (oracle == "influence") {
      res.tolerance = 1e-10;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto f = verify::random_unit_function(sp, rng, zero);
        const auto inf = influences(f);
        for (std::size_t i = 0; i < sp.n(); ++i) track(inf[i], verify::influence_by_variance(f, i));
      }
    } else if (oracle == "noise") {
      res.tolerance = 1e-12;
      const double eta = ctx.cfg.real_in("eta", 0.9, 0.0, 1.0, true, true);
      for (std::size_t t = 0; t < trials; ++t) {
        const auto f = verify::random_unit_function(sp, rng, zero);
        const auto lib = noise_operator(f, eta);
        const auto direct = verify::noise_direct(f, eta);
        for (PointIndex x = 0; x < sp.size(); ++x) track(lib[x], direct[x]);
      }
    } else if (oracle == "condexp") {
      res.tolerance = 1e-12;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto f = verify::random_unit_function(sp, rng, zero);
        std::vector<std::size_t> c;
        for (std::size_t i = 0; i < sp.n(); ++i)
          if (rng.bernoulli(0.5)) c.push_back(i);
        const CoordinateSet coords(c);
        const auto lib = conditional_expectation(f, coords);
        const auto direct = verify::conditional_expectation_direct(f, coords);
        for (std::size_t a = 0; a < direct.size(); ++a) track(lib[a], direct[a]);
      }
    } else if (oracle == "mwis") {
      res.tolerance = 1e-12;
      if (sp.size() > 24) throw ConfigError(ctx.cfg.origin() + ": oracle 'mwis' needs at most 24 points");
      std::vector<PointIndex> all(sp.size());
      for (PointIndex x = 0; x < sp.size(); ++x) all[x] = x;
      const SupportGraph graph = build_support_graph(sp, all);
      for (std::size_t t = 0; t < trials; ++t) {
        const auto w = verify::random_values(sp.size(), rng, zero);
        track(max_weight_independent_set(graph, w, ctx.cap_mwis).weight, verify::mwis_exhaustive(graph, w).weight);
      }
    } else if (oracle == "edge-cube") {
      res.tolerance = 1e-12;
      if (sp.radix() != 2) throw ConfigError(ctx.cfg.origin() + ": oracle 'edge-cube' needs a disjointness chain");
      const double p = sp.base().stationary()(1);
      for (std::size_t t = 0; t < trials; ++t) {
        const auto g = verify::random_unit_function(sp, rng, zero);
        track(edge_cube(g, p), verify::edge_cube_pairs(g, p));
      }
    } else {
      throw ConfigError(ctx.cfg.origin() + ": field 'oracle': unknown oracle '" + oracle +
                        "' (quadform, influence, noise, condexp, mwis, edge-cube, edge-layer)");
    }
  }
  rep.add("comparisons", res.comparisons);
  rep.add_real("max_deviation", res.deviation);
  rep.add_real("tolerance", res.tolerance);
  const bool ok = res.deviation <= res.tolerance;
  rep.add("within_tolerance", ok);
  if (!ok) ctx.message = "oracle deviation above tolerance";
  return ok ? kExitOk : kExitInvariant;
}

int cmd_schedule(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"chain", "c", "eps", "alpha", "r", "towers"}));
  const auto chain = chain_of(ctx);
  const double c = ctx.cfg.real_in("c", 1.0, 0.0, 1e6);
  const double eps = ctx.cfg.real_in("eps", 0.1, 0.0, 1.0, false, true);
  const double alpha = ctx.cfg.real_in("alpha", eps, 0.0, 1.0);
  const std::size_t r = ctx.cfg.count("r", 10);
  const std::size_t towers = ctx.cfg.count("towers", 6);
  const ParameterSchedule s = schedule(c, eps, alpha, r, *chain);
  Report& rep = ctx.rep;
  rep.add_real("c", s.c);
  rep.add_real("eps", s.eps);
  rep.add_real("alpha", s.alpha);
  rep.add("r", s.r);
  rep.add("states", s.radix);
  rep.add_real("w_min", s.w_min);
  rep.add_real("delta1", s.delta1);
  rep.add_real("j1", s.j1);
  rep.add_real("r1", s.r1);
  rep.add_real("r2", s.r2);
  rep.add("compositions", s.compositions);
  std::vector<std::string> iterates;
  for (const auto& m : s.gamma_iterates) iterates.push_back(to_string(m));
  rep.add("gamma_iterates", iterates);
  rep.add("k", to_string(s.k));
  if (s.log10_delta2) rep.add_real("log10_delta2", *s.log10_delta2);
  else rep.add("log10_delta2", "unavailable (k astronomical)");
  rep.add_real("delta2", s.delta2);
  std::vector<std::string> tw;
  for (std::size_t t = 0; t <= towers; ++t) tw.push_back(to_string(tower(t)));
  rep.add("tower", tw);
  return kExitOk;
}

int cmd_phi_grid(Context& ctx) {
  ctx.cfg.reject_unknown(keys({"x_max", "points", "lambdas", "uv_points"}));
  const double x_max = ctx.cfg.real_in("x_max", 1.5, 0.0, 1e6);
  const std::size_t points = ctx.cfg.count("points", 31);
  const std::size_t lambdas = ctx.cfg.count("lambdas", 25);
  const std::size_t uv = ctx.cfg.count("uv_points", 20);
  if (points < 2 || lambdas < 2 || uv < 1) throw ConfigError(ctx.cfg.origin() + ": grid sizes too small");
  Report& rep = ctx.rep;
  std::vector<std::vector<double>> table;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = x_max * static_cast<double>(i) / static_cast<double>(points - 1);
    table.push_back({x, phi(x)});
  }
  rep.add("phi", table);
  rep.add_real("anchor", 0.25 * phi(0.5) + 0.75 * phi(7.0 / 6.0));
  rep.add_real("anchor_target", 1.0 / 32);

  double worst = std::numeric_limits<double>::infinity();
  std::size_t admissible = 0;
  for (std::size_t a = 0; a < lambdas; ++a) {
    const double lambda = 0.25 + 0.75 * static_cast<double>(a) / static_cast<double>(lambdas - 1);
    for (std::size_t i = 1; i <= uv; ++i) {
      for (std::size_t j = 1; j <= uv; ++j) {
        const double u = 2.0 * static_cast<double>(i) / static_cast<double>(uv);
        const double v = 2.0 * static_cast<double>(j) / static_cast<double>(uv);
        const double w = lambda * u + (1.0 - lambda) * v;
        if (u > w / 2) continue;
        ++admissible;
        worst = std::min(worst, check_phi_inequality(lambda, u, v).margin);
      }
    }
  }
  rep.add("inequality.admissible_points", admissible);
  rep.add_real("inequality.worst_margin", admissible ? worst : 0.0);
  if (admissible && worst < -1e-12) {
    ctx.message = "phi inequality margin below tolerance";
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace

const std::vector<CommandEntry>& commands() {
  static const std::vector<CommandEntry> table{
      {"validate-chain", "Validate a chain and print its stationary measure and spectrum", cmd_validate_chain},
      {"quadform", "Quadratic form <f, A g> with a spectral recheck", cmd_quadform},
      {"decompose", "Matching-like decomposition of g", cmd_decompose},
      {"far", "Distance of g from independent sets", cmd_far},
      {"refine", "Entropy refinement loop with its trace", cmd_refine},
      {"capture", "Junta capture of two functions", cmd_capture},
      {"independent-capture", "Junta capture pruned to an independent set", cmd_independent_capture},
      {"kneser", "Layer function through lift, capture, and read-back", cmd_kneser},
      {"sweep", "Property suites", cmd_sweep},
      {"oracle-compare", "Library routine against its brute-force oracle", cmd_oracle_compare},
      {"schedule", "Parameter schedule and tower values", cmd_schedule},
      {"phi-grid", "Table of x ln x and the two-point inequality margins", cmd_phi_grid},
  };
  return table;
}

}  // namespace removal::cli
