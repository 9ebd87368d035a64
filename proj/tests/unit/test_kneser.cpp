#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "removal/independent.hpp"
#include "removal/kneser.hpp"
#include "removal/random.hpp"
#include "removal/verify/oracles.hpp"

using namespace removal;

TEST_SUITE("kneser") {

TEST_CASE("disjointness chain domain") {
  CHECK_THROWS_AS(disjointness_chain(0.5), DomainError);
  CHECK_THROWS_AS(disjointness_chain(0.0), DomainError);
  const BaseChain c = disjointness_chain(0.2);
  CHECK(c.stationary()(1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(c.edge_weight(0, 1) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("mask and point conversion") {
  CHECK(mask_to_point(3, 0b001) == 0b100);
  CHECK(point_to_mask(3, 0b100) == 0b001);
  for (SubsetMask m = 0; m < 64; ++m) CHECK(point_to_mask(6, mask_to_point(6, m)) == m);
}

TEST_CASE("mu_pp") {
  const double p = 0.25;
  CHECK(mu_pp(3, p, 0, 0) == doctest::Approx(std::pow(0.5, 3)));
  CHECK(mu_pp(3, p, 0b011, 0b010) == 0.0);
  CHECK(mu_pp(3, p, 0b001, 0b110) == doctest::Approx(1.0 / 64).epsilon(1e-15));
  const auto sp = disjointness_space(p, 3);
  CHECK(edge_weight(sp, mask_to_point(3, 0b001), mask_to_point(3, 0b110)) ==
        doctest::Approx(1.0 / 64).epsilon(1e-15));
}

TEST_CASE("mu_pp is the product-chain edge weight") {
  const double p = 0.3;
  const std::size_t n = 6;
  const auto sp = disjointness_space(p, n);
  for (SubsetMask x = 0; x < 64; ++x)
    for (SubsetMask y = 0; y < 64; ++y)
      CHECK(std::abs(mu_pp(n, p, x, y) - edge_weight(sp, mask_to_point(n, x), mask_to_point(n, y))) <= 1e-15);
}

TEST_CASE("edge_cube") {
  const double p = 0.25;
  const auto sp = disjointness_space(p, 6);
  CHECK(edge_cube(PointFunction::constant(sp, 1.0), p) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<PointIndex> star;
  for (SubsetMask m = 0; m < 64; ++m)
    if (m & 1) star.push_back(mask_to_point(6, m));
  CHECK(edge_cube(PointFunction::indicator(sp, star), p) == 0.0);
  Rng rng(51);
  for (int t = 0; t < 10; ++t) {
    const auto g = verify::random_unit_function(sp, rng);
    const double e = edge_cube(g, p);
    CHECK(std::abs(e - verify::edge_cube_pairs(g, p)) <= 1e-12);
    CHECK(std::abs(e - quad_form(g, g)) <= 1e-12);
  }
  CHECK_THROWS_AS(edge_cube(PointFunction::constant(sp, 1.0), 0.3), DomainError);
}

TEST_CASE("subset ranking") {
  CHECK(binomial(9, 3) == 84.0);
  CHECK(binomial(3, 5) == 0.0);
  CHECK(subset_rank(0b0111) == 0);
  CHECK(subset_rank(0b1011) == 1);
  const LayerFunction f = LayerFunction::constant(9, 3, 0.0);
  const auto& masks = f.masks();
  REQUIRE(masks.size() == 84);
  for (std::uint64_t r = 0; r < masks.size(); ++r) {
    CHECK(subset_rank(masks[r]) == r);
    CHECK(subset_unrank(3, r) == masks[r]);
    CHECK(std::popcount(masks[r]) == 3);
    if (r > 0) CHECK(masks[r - 1] < masks[r]);
  }
}

TEST_CASE("layer function domain") {
  CHECK_THROWS_AS(LayerFunction(6, 3, std::vector<double>(20, 0.0)), DomainError);
  CHECK_THROWS_AS(LayerFunction(6, 2, std::vector<double>(14, 0.0)), DimensionError);
  CHECK_THROWS(require_layer_ratio(10, 3, 0.25));
  CHECK_NOTHROW(require_layer_ratio(12, 3, 0.25));
}

TEST_CASE("edge_layer") {
  const auto one = edge_layer(LayerFunction::constant(8, 2, 1.0));
  CHECK(one.ordered == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.unordered == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(edge_layer(LayerFunction::star(8, 2, 0)).ordered == 0.0);
  Rng rng(52);
  for (int t = 0; t < 10; ++t) {
    const auto f = verify::random_layer_function(8, 2, rng);
    CHECK(std::abs(edge_layer(f).ordered - verify::edge_layer_pairs(f)) <= 1e-13);
  }
}

TEST_CASE("up-lift of the constant is the threshold indicator") {
  const double p = 0.25;
  const auto g = up_lift(LayerFunction::constant(8, 2, 1.0), p);
  for (PointIndex x = 0; x < g.size(); ++x)
    CHECK(g[x] == (std::popcount(point_to_mask(8, x)) >= 2 ? 1.0 : 0.0));
}

TEST_CASE("up-lift of a star counts subsets through the centre") {
  const auto f = LayerFunction::star(6, 2, 0);
  const auto g = up_lift(f, 1.0 / 3);
  for (PointIndex x = 0; x < g.size(); ++x) {
    const SubsetMask m = point_to_mask(6, x);
    const int s = std::popcount(m);
    double expected = 0.0;
    if (s >= 2 && (m & 1)) expected = 2.0 / s;
    CHECK(g[x] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(g[x] == doctest::Approx(verify::up_lift_at(f, m)).epsilon(1e-14));
  }
}

TEST_CASE("up lemma") {
  Rng rng(53);
  for (int t = 0; t < 10; ++t) {
    const auto f = verify::random_layer_function(9, 3, rng);
    const auto g = up_lift(f, 1.0 / 3);
    const double lhs = edge_cube(g, 1.0 / 3);
    const double layer = edge_layer(f).ordered;
    CHECK(lhs <= layer + 1e-12);
    CHECK(std::abs(lhs - c_constant(1.0 / 3, 9) * layer) <= 1e-12);
  }
}

TEST_CASE("c constant") {
  for (auto [p, n] : {std::pair{0.25, 4}, {0.25, 8}, {1.0 / 3, 9}, {0.25, 12}}) {
    const double c = c_constant(p, n);
    CHECK(c > 0.0);
    CHECK(c <= 1.0);
    CHECK(std::abs(c - verify::c_constant_closed_form(p, n)) <= 1e-13);
  }
  // k = 1 at n = 4: every pair of nonempty disjoint sets.
  double direct = 0.0;
  for (SubsetMask x = 1; x < 16; ++x)
    for (SubsetMask y = 1; y < 16; ++y) direct += mu_pp(4, 0.25, x, y);
  CHECK(c_constant(0.25, 4) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("down lemma on the constant function") {
  const std::size_t n = 12, k = 3;
  const double p = 0.25;
  const auto f = LayerFunction::constant(n, k, 1.0);
  const auto g = up_lift(f, p);
  const CoordinateSet coords{0, 5};
  for (const auto& d : down_ratios(f, g, coords, p)) {
    const double expected = binomial(n - 2, k - d.weight) / binomial(n, k);
    CHECK(d.v_f == doctest::Approx(expected).epsilon(1e-14));
    CHECK(d.bound_ok);
  }
}

TEST_CASE("down lemma inner sum") {
  const double s = down_inner_sum(64, 16, 0.25, 2, 1);
  CHECK(s > 0.2);
  CHECK(std::abs(down_inner_sum(12, 3, 0.25, 2, 1) - verify::down_inner_sum_direct(12, 3, 0.25, 2, 1)) <= 1e-12);
}

TEST_CASE("down lemma on random layer functions") {
  Rng rng(54);
  for (int t = 0; t < 5; ++t) {
    const auto f = verify::random_layer_function(12, 3, rng);
    const auto g = up_lift(f, 0.25);
    for (const auto& d : down_ratios(f, g, CoordinateSet{2, 7}, 0.25)) {
      CHECK(d.bound_ok);
      const auto single = down_ratio(f, g, CoordinateSet{2, 7}, d.w, 0.25);
      CHECK(single.v_f == d.v_f);
      CHECK(single.v_g == d.v_g);
    }
  }
}

TEST_CASE("intersecting families") {
  const std::vector<SubsetMask> star{0b01, 0b11};
  CHECK(is_intersecting(star));
  const std::vector<SubsetMask> with_empty{0b00};
  CHECK_FALSE(is_intersecting(with_empty));
  const std::vector<SubsetMask> disjoint{0b01, 0b10};
  CHECK_FALSE(is_intersecting(disjoint));
  CHECK(is_intersecting(std::vector<SubsetMask>{}));
}

TEST_CASE("intersecting equals independent in the disjointness cube") {
  for (std::size_t j = 1; j <= 4; ++j) {
    const auto sp = disjointness_space(0.25, j);
    const std::size_t cells = std::size_t{1} << j;
    for (std::uint64_t family = 0; family < (std::uint64_t{1} << cells); ++family) {
      std::vector<PointIndex> t;
      for (PointIndex c = 0; c < cells; ++c)
        if ((family >> c) & 1) t.push_back(c);
      const auto masks = cells_to_masks(j, t);
      CHECK(is_intersecting(masks) == is_independent(sp, t));
    }
  }
}

TEST_CASE("kneser capture of a star") {
  CaptureParams params;
  params.eta = 0.95;
  const auto r = kneser_capture(LayerFunction::star(9, 3, 0), 0.05, 1.0 / 3, params);
  CHECK(r.coords == CoordinateSet{0});
  CHECK(r.family == std::vector<SubsetMask>{1});
  CHECK(r.intersecting);
  CHECK(r.loss == 0.0);
  CHECK(r.loss_ok);
  CHECK(r.edge.ordered == 0.0);
}

TEST_CASE("kneser capture of zero") {
  const auto r = kneser_capture(LayerFunction::constant(9, 3, 0.0), 0.05, 1.0 / 3, {});
  CHECK(r.coords.empty());
  CHECK(r.family.empty());
  CHECK(r.loss == 0.0);
}

TEST_CASE("kneser capture needs k = p n") {
  CHECK_THROWS(kneser_capture(LayerFunction::constant(9, 3, 0.0), 0.05, 0.25, {}));
}

}  // TEST_SUITE
