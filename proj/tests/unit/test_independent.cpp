#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "removal/independent.hpp"
#include "removal/kneser.hpp"
#include "removal/random.hpp"
#include "removal/verify/oracles.hpp"

using namespace removal;

namespace {

ProductSpace k3_space(std::size_t n) {
  return ProductSpace(std::make_shared<const BaseChain>(k3_chain()), n);
}

std::vector<PointIndex> slice(const ProductSpace& sp, std::size_t c, std::size_t value) {
  std::vector<PointIndex> out;
  for (PointIndex x = 0; x < sp.size(); ++x)
    if (sp.digits(x)[c] == value) out.push_back(x);
  return out;
}

}  // namespace

TEST_SUITE("independent") {

TEST_CASE("independence of point sets") {
  const auto sp = k3_space(2);
  CHECK(is_independent(sp, std::vector<PointIndex>{}));
  CHECK(is_independent(sp, slice(sp, 0, 0)));
  CHECK_FALSE(is_independent(sp, std::vector<PointIndex>{0, 4}));
  // The empty set is a loop vertex of the disjointness cube.
  const auto cube = disjointness_space(0.25, 3);
  CHECK_FALSE(is_independent(cube, std::vector<PointIndex>{0}));
  CHECK(is_independent(cube, std::vector<PointIndex>{4, 6}));
}

TEST_CASE("support graph") {
  const auto sp = k3_space(2);
  const auto g = build_support_graph(sp, std::vector<PointIndex>{0, 1, 4});
  CHECK(g.neighbors[0] == std::vector<std::size_t>{2});
  CHECK(g.neighbors[1].empty());
  CHECK(g.loop == std::vector<bool>{false, false, false});
}

TEST_CASE("mwis on an edgeless graph takes everything") {
  SupportGraph g;
  g.vertices = {0, 1, 2};
  g.neighbors = {{}, {}, {}};
  g.loop = {false, false, false};
  const double w[] = {1.0, 2.0, 0.5};
  const auto r = max_weight_independent_set(g, w);
  CHECK(r.points == std::vector<PointIndex>{0, 1, 2});
  CHECK(r.weight == doctest::Approx(3.5));
}

TEST_CASE("mwis on a single edge picks the heavier end") {
  SupportGraph g;
  g.vertices = {10, 11};
  g.neighbors = {{1}, {0}};
  g.loop = {false, false};
  const double w[] = {3.0, 5.0};
  const auto r = max_weight_independent_set(g, w);
  CHECK(r.points == std::vector<PointIndex>{11});
  CHECK(r.weight == 5.0);
}

TEST_CASE("mwis skips loop vertices") {
  SupportGraph g;
  g.vertices = {0, 1};
  g.neighbors = {{}, {}};
  g.loop = {true, false};
  const double w[] = {10.0, 1.0};
  CHECK(max_weight_independent_set(g, w).points == std::vector<PointIndex>{1});
}

TEST_CASE("mwis of K3^2 under mu is a dictatorship slice") {
  const auto sp = k3_space(2);
  std::vector<PointIndex> all(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) all[x] = x;
  const auto g = build_support_graph(sp, all);
  const auto r = max_weight_independent_set(g, sp.measure_table());
  CHECK(r.weight == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(r.points.size() == 3);
  CHECK(is_independent(sp, r.points));
  CHECK(verify::mwis_exhaustive(g, sp.measure_table()).weight == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("mwis matches the exhaustive oracle on random weights") {
  const auto sp = k3_space(2);
  Rng rng(21);
  std::vector<PointIndex> all(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) all[x] = x;
  const auto g = build_support_graph(sp, all);
  for (int t = 0; t < 50; ++t) {
    const auto w = verify::random_values(sp.size(), rng, 0.2);
    CHECK(std::abs(max_weight_independent_set(g, w).weight - verify::mwis_exhaustive(g, w).weight) <= 1e-13);
  }
}

TEST_CASE("mwis cap") {
  SupportGraph g;
  g.vertices = {0, 1, 2};
  g.neighbors = {{}, {}, {}};
  g.loop = {false, false, false};
  const double w[] = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(max_weight_independent_set(g, w, 2), CapExceeded);
}

TEST_CASE("farness") {
  const auto sp = k3_space(2);
  const auto ind = PointFunction::indicator(sp, slice(sp, 0, 0));
  const auto r = eps_far_from_independent(ind, 0.0);
  CHECK_FALSE(r.far);
  CHECK(r.uncaptured == doctest::Approx(0.0));
  CHECK_FALSE(eps_far_from_independent(PointFunction::constant(sp, 0.0), 0.0).far);
  const auto one = eps_far_from_independent(PointFunction::constant(sp, 1.0), 0.5);
  CHECK(one.far);
  CHECK(one.best_captured == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("decomposition of trivial inputs") {
  const auto sp = k3_space(2);
  const auto ind = PointFunction::indicator(sp, slice(sp, 1, 2));
  const auto d = matching_like_decompose(ind);
  for (double v : d.f.values()) CHECK(v == 0.0);
  CHECK(d.residual_set == slice(sp, 1, 2));
  const auto z = matching_like_decompose(PointFunction::constant(sp, 0.0));
  for (double v : z.f.values()) CHECK(v == 0.0);
  CHECK(z.residual_set.empty());
}

TEST_CASE("decomposition output on random inputs") {
  Rng rng(22);
  for (const auto& sp : {k3_space(2), k3_space(3), disjointness_space(0.25, 4)}) {
    for (int t = 0; t < 20; ++t) {
      const auto g = verify::random_unit_function(sp, rng, 0.3);
      const auto d = matching_like_decompose(g);
      for (PointIndex x = 0; x < g.size(); ++x) CHECK(d.f[x] <= g[x]);
      CHECK(is_independent(sp, d.residual_set));
      const auto chk = is_matching_like(d.f);
      CHECK(chk.slack >= -kMatchingLikeTolerance);
      CHECK(chk.matching_like);
    }
  }
}

TEST_CASE("matching-like check") {
  const auto sp = k3_space(1);
  CHECK(is_matching_like(PointFunction::constant(sp, 0.0)).matching_like);
  const auto edge = PointFunction::indicator(sp, std::vector<PointIndex>{0, 1});
  const auto e = is_matching_like(edge);
  CHECK(e.matching_like);
  CHECK(std::abs(e.slack) <= 1e-15);
  const auto single = PointFunction::indicator(sp, std::vector<PointIndex>{2});
  CHECK_FALSE(is_matching_like(single).matching_like);
}

}  // TEST_SUITE
