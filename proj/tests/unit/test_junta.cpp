#include <doctest.h>

#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "embedding.hpp"
#include "removal/junta.hpp"
#include "removal/kneser.hpp"
#include "removal/random.hpp"
#include "removal/verify/oracles.hpp"

using namespace removal;

namespace {

ProductSpace k3_space(std::size_t n) {
  return ProductSpace(std::make_shared<const BaseChain>(k3_chain()), n);
}

PointFunction dictatorship(const ProductSpace& sp, std::size_t c) {
  std::vector<double> v(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) v[x] = sp.digits(x)[c] == 0 ? 1.0 : 0.0;
  return PointFunction(sp, v);
}

// Outside mass of T for f, by summing over every point of V^n.
double outside_direct(const PointFunction& f, const CoordinateSet& coords,
                      const std::vector<PointIndex>& t) {
  const std::set<PointIndex> in(t.begin(), t.end());
  double s = 0.0;
  for (PointIndex x = 0; x < f.size(); ++x) {
    if (!in.count(project(f.space(), x, coords))) s += f.space().measure(x) * f[x];
  }
  return s;
}

}  // namespace

TEST_SUITE("junta") {

TEST_CASE("spectral capture of a dictatorship") {
  const auto f = dictatorship(k3_space(3), 0);
  const auto out = junta_capture_spectral(f, f, 0.1, 0.9, 0.01);
  CHECK(out.status == CaptureStatus::kOk);
  const JuntaCapture& c = out.capture;
  CHECK(c.coords == CoordinateSet{0});
  CHECK(c.t1 == std::vector<PointIndex>{0});
  CHECK(c.t2 == std::vector<PointIndex>{0});
  CHECK(std::abs(c.outside1) <= 1e-15);
  CHECK(std::abs(c.outside2) <= 1e-15);
  CHECK(c.cross == 0.0);
  CHECK(c.measure1 == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("spectral capture of constants") {
  const auto sp = k3_space(3);
  const auto zero = PointFunction::constant(sp, 0.0);
  const auto z = junta_capture_spectral(zero, zero, 0.1, 0.9, 0.01).capture;
  CHECK(z.coords.empty());
  CHECK(z.t1.empty());
  CHECK(z.outside1 == 0.0);

  const auto one = PointFunction::constant(sp, 1.0);
  const auto o = junta_capture_spectral(one, one, 0.1, 0.9, 0.01).capture;
  CHECK(o.coords.empty());
  CHECK(o.t1 == std::vector<PointIndex>{0});
  CHECK(o.outside1 == 0.0);
  CHECK(o.cross == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spectral outside mass agrees with direct summation") {
  const auto sp = k3_space(4);
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto f1 = verify::random_unit_function(sp, rng, 0.5);
    const auto f2 = verify::random_unit_function(sp, rng, 0.5);
    const auto c = junta_capture_spectral(f1, f2, 0.1, 0.95, 0.02).capture;
    CHECK(c.outside1 <= 0.1);
    CHECK(c.outside2 <= 0.1);
    CHECK(std::abs(c.outside1 - outside_direct(f1, c.coords, c.t1)) <= 1e-12);
    CHECK(std::abs(c.outside2 - outside_direct(f2, c.coords, c.t2)) <= 1e-12);
  }
}

TEST_CASE("budget exceeded at the starting threshold is a soft failure") {
  const auto sp = k3_space(4);
  Rng rng(32);
  const auto f = verify::random_unit_function(sp, rng);
  const auto out = junta_capture_spectral(f, f, 0.1, 0.99, 1e-6, 1);
  CHECK(out.status == CaptureStatus::kBudgetExceeded);
  CHECK(out.capture.coords.size() == 1);
}

TEST_CASE("practical capture halves gamma and rejects faithful mode") {
  const auto f = dictatorship(k3_space(3), 1);
  CaptureParams params;
  const auto out = junta_capture(f, f, 0.1, params);
  CHECK(out.status == CaptureStatus::kOk);
  CHECK(out.capture.coords == CoordinateSet{1});
  params.mode = CaptureMode::kFaithful;
  CHECK_THROWS_AS(junta_capture(f, f, 0.1, params), DomainError);
}

TEST_CASE("brute force agrees with the spectral capture on a dictatorship") {
  const auto f = dictatorship(k3_space(3), 0);
  const auto bf = junta_capture_bruteforce(f, f, 0.1, 1);
  const auto sp = junta_capture_spectral(f, f, 0.1, 0.9, 0.01).capture;
  CHECK(bf.coords == sp.coords);
  CHECK(bf.t1 == sp.t1);
  CHECK(bf.t2 == sp.t2);
}

TEST_CASE("brute force on a two-coordinate function") {
  const auto sp = k3_space(3);
  std::vector<double> v(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) {
    const auto d = sp.digits(x);
    v[x] = (d[1] == 0 && d[2] != 2) ? 1.0 : 0.0;
  }
  const PointFunction f(sp, v);
  const auto bf = junta_capture_bruteforce(f, f, 0.05, 2);
  CHECK(bf.coords.is_subset_of(CoordinateSet{1, 2}));
  const ProductSpace cells = sp.with_dimension(bf.coords.size());
  const auto i1 = PointFunction::indicator(cells, bf.t1);
  const auto i2 = PointFunction::indicator(cells, bf.t2);
  CHECK(std::abs(bf.cross - quad_form(i1, i2)) <= 1e-15);
  CHECK(bf.outside1 <= 0.05);
}

TEST_CASE("brute force on zero") {
  const auto z = PointFunction::constant(k3_space(2), 0.0);
  const auto bf = junta_capture_bruteforce(z, z, 0.1, 2);
  CHECK(bf.coords.empty());
  CHECK(bf.t1.empty());
  CHECK(bf.t2.empty());
  CHECK(bf.cross == 0.0);
  CHECK(bf.outside1 == 0.0);
  CHECK(bf.measure1 == 0.0);
}

TEST_CASE("brute force never loses to the spectral capture") {
  const auto sp = k3_space(3);
  Rng rng(33);
  for (int t = 0; t < 10; ++t) {
    const auto f1 = verify::random_unit_function(sp, rng, 0.6);
    const auto f2 = verify::random_unit_function(sp, rng, 0.6);
    const auto out = junta_capture_spectral(f1, f2, 0.15, 0.95, 0.05, 2);
    if (out.status != CaptureStatus::kOk) continue;
    const auto bf = junta_capture_bruteforce(f1, f2, 0.15, 2);
    CHECK(bf.cross <= out.capture.cross + 1e-13);
  }
}

TEST_CASE("one-sided selection") {
  const auto sp = k3_space(3);
  const auto one = PointFunction::constant(sp, 1.0);
  const auto dict = dictatorship(sp, 0);
  const CaptureParams params;

  const auto a = one_sided_capture(one, dict, 0.1, params);
  REQUIRE(a.ok);
  CHECK(a.side == 2);
  CHECK(a.measure1 == doctest::Approx(1.0));
  CHECK(a.cells == std::vector<PointIndex>{0});

  const auto b = one_sided_capture(dict, dict, 0.1, params);
  REQUIRE(b.ok);
  CHECK(b.side == 1);

  const auto c = one_sided_capture(one, one, 0.1, params);
  CHECK_FALSE(c.ok);
  CHECK(c.measure1 == doctest::Approx(1.0));
  CHECK(c.measure2 == doctest::Approx(1.0));
  CHECK_FALSE(c.failure.empty());
}

TEST_CASE("independent capture of a dictatorship") {
  const auto g = dictatorship(k3_space(4), 0);
  CaptureParams params;
  params.eta = 0.95;
  const auto r = independent_junta_capture(g, 0.1, params);
  CHECK(r.coords == CoordinateSet{0});
  CHECK(r.cells == std::vector<PointIndex>{0});
  CHECK(r.independent);
  CHECK(r.loss == 0.0);
}

TEST_CASE("independent capture of zero") {
  const auto r = independent_junta_capture(PointFunction::constant(k3_space(3), 0.0), 0.1, {});
  CHECK(r.coords.empty());
  CHECK(r.cells.empty());
  CHECK(r.loss == 0.0);
}

TEST_CASE("pruning an edge-heavy capture") {
  const auto sp = k3_space(3);
  std::vector<double> v(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) v[x] = sp.digits(x)[0] != 2 ? 1.0 : 0.0;
  const PointFunction g(sp, v);
  CaptureParams params;
  params.eta = 0.95;
  const auto r = independent_junta_capture(g, 0.1, params);
  CHECK(r.coords == CoordinateSet{0});
  CHECK(r.unpruned == std::vector<PointIndex>{0, 1});
  CHECK(r.cells.size() == 1);
  CHECK(r.independent);
  CHECK(std::abs(r.loss - outside_direct(g, r.coords, r.cells)) <= 1e-15);
  CHECK(std::abs(r.loss - r.pruned_mass) <= 1e-15);
  CHECK(r.loss == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("noisy inner-product gap") {
  const auto sp = k3_space(3);
  Rng rng(34);
  const auto f1 = verify::random_unit_function(sp, rng);
  const auto f2 = verify::random_unit_function(sp, rng);
  CHECK(noisy_ip_gap(f1, f2, 1.0).gap == doctest::Approx(0.0).epsilon(1e-15));
  const auto c = PointFunction::constant(sp, 0.7);
  CHECK(std::abs(noisy_ip_gap(c, c, 0.8).gap) <= 1e-14);
  const auto r = noisy_ip_gap(f1, f2, 0.99);
  CHECK(r.condition_ok);
  CHECK(r.gap <= r.bound);
  CHECK_THROWS_AS(noisy_ip_gap(f1, f2, 0.5), DomainError);
  CHECK_FALSE(noisy_gap_admissible(0.5, 0.5));
  CHECK_FALSE(noisy_gap_admissible(0.9, 0.5));
  CHECK(noisy_gap_admissible(0.99, 0.5));
}

TEST_CASE("two-function embedding doubles the edge weight") {
  const auto sp = k3_space(2);
  Rng rng(35);
  const auto f1 = verify::random_unit_function(sp, rng);
  const auto f2 = verify::random_unit_function(sp, rng);
  const auto e = testing::embed_pair(f1, f2);
  CHECK(e.a1 == 0);
  CHECK(e.a2 == 4);
  CHECK(e.weight == doctest::Approx(1.0 / 36).epsilon(1e-15));
  CHECK(std::abs(quad_form(e.f, e.f) - 2.0 * e.weight * quad_form(f1, f2)) <= 1e-15);

  // The disjointness cube has a loop at the empty set, so the pair avoids it.
  const auto cube = disjointness_space(0.25, 2);
  const auto pair = testing::embedding_pair(cube);
  CHECK_FALSE(cube.adjacent(pair.first, pair.first));
  CHECK(cube.adjacent(pair.first, pair.second));
}

TEST_CASE("label density") {
  const ProductSpace cells = k3_space(2);
  LabelMap shared{cells, std::vector<std::vector<std::size_t>>(cells.size(), {7}), 2, 4.0};
  const auto s = label_density_check(shared, 0.1);
  CHECK(s.best_label == std::optional<std::size_t>{7});
  CHECK(s.best_measure == doctest::Approx(1.0));
  CHECK(s.holds);

  LabelMap empty{cells, std::vector<std::vector<std::size_t>>(cells.size()), 2, 4.0};
  const auto e = label_density_check(empty, 0.1);
  CHECK(e.pair_density == 0.0);
  CHECK(e.vacuous);
  CHECK_FALSE(e.best_label.has_value());
}

TEST_CASE("label density matches an exhaustive scan") {
  const ProductSpace cells = k3_space(2);
  Rng rng(36);
  for (int t = 0; t < 20; ++t) {
    LabelMap m{cells, {}, 2, 4.0};
    for (PointIndex a = 0; a < cells.size(); ++a) {
      std::set<std::size_t> l;
      const auto count = rng.below(3);
      for (std::uint64_t i = 0; i < count; ++i) l.insert(rng.below(4));
      m.labels.emplace_back(l.begin(), l.end());
    }
    const auto r = label_density_check(m, 0.1);
    double best = 0.0;
    for (std::size_t label = 0; label < 4; ++label) {
      double mass = 0.0;
      for (PointIndex a = 0; a < cells.size(); ++a)
        if (std::count(m.labels[a].begin(), m.labels[a].end(), label)) mass += cells.measure(a);
      best = std::max(best, mass);
    }
    double pairs = 0.0;
    for (PointIndex a = 0; a < cells.size(); ++a) {
      for (PointIndex b = 0; b < cells.size(); ++b) {
        bool meet = false;
        for (auto l : m.labels[a]) meet |= std::count(m.labels[b].begin(), m.labels[b].end(), l) > 0;
        if (meet) pairs += cells.measure(a) * verify::kernel_entry(cells, a, b);
      }
    }
    CHECK(std::abs(r.best_measure - best) <= 1e-15);
    CHECK(std::abs(r.pair_density - pairs) <= 1e-15);
    CHECK(r.threshold == doctest::Approx(std::pow(0.1 / 4.0, 4.0)));
  }
}

TEST_CASE("faithful parameter trail") {
  const auto fp = faithful_parameters(0.1, 1.0, 0.5, 4.0);
  CHECK(fp.tau == doctest::Approx(0.1));
  CHECK(fp.eta > 0.5);
  CHECK(fp.eta < 1.0);
  CHECK(2.0 * std::sqrt(fp.one_minus_eta) <= fp.delta_moo * 0.05);
  CHECK(noisy_gap_admissible(fp.eta, 0.5));
  REQUIRE(fp.log10_gamma.has_value());
  REQUIRE(fp.log10_j_bound.has_value());
  CHECK(*fp.log10_gamma < 0.0);
  CHECK(*fp.log10_j_bound > 0.0);
}

}  // TEST_SUITE
