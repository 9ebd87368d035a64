#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "removal/random.hpp"
#include "removal/refine.hpp"
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

}  // namespace

TEST_SUITE("refine") {

TEST_CASE("phi") {
  CHECK(phi(0.0) == 0.0);
  CHECK(phi(1.0) == 0.0);
  CHECK(phi(0.5) == doctest::Approx(0.5 * std::log(0.5)));
  CHECK_THROWS_AS(phi(-0.1), DomainError);
  const double anchor = 0.25 * phi(0.5) + 0.75 * phi(7.0 / 6.0);
  CHECK(anchor == doctest::Approx(0.04824).epsilon(1e-4));
  CHECK(anchor > 1.0 / 32);
}

TEST_CASE("entropy") {
  const auto sp = k3_space(3);
  Rng rng(41);
  const auto f = verify::random_unit_function(sp, rng);
  const double a = f.expectation();
  CHECK(entropy(f, CoordinateSet{}) == doctest::Approx(a * std::log(a)).epsilon(1e-14));
  CHECK(entropy(dictatorship(sp, 1), CoordinateSet{1}) == 0.0);
  CHECK(entropy(f, CoordinateSet{0}) <= entropy(f, CoordinateSet{0, 2}) + 1e-12);
  CHECK(entropy(f, CoordinateSet{0, 2}) <= 0.0);
}

TEST_CASE("phi inequality") {
  const auto b = check_phi_inequality(0.25, 0.5, 7.0 / 6.0);
  CHECK(b.w == doctest::Approx(1.0));
  CHECK(b.holds);
  CHECK(b.margin > 0.0);
  CHECK_THROWS_AS(check_phi_inequality(1.0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(check_phi_inequality(0.2, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(check_phi_inequality(0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("witness with empty S fails condition 1") {
  const auto f = dictatorship(k3_space(2), 1);
  const RefinementWitness w{CoordinateSet{}, {}};
  const auto d = verify_witness(f, 1, w);
  CHECK_FALSE(d.accepted);
  CHECK_FALSE(d.covered_ok);
  CHECK(d.shape_error.empty());
}

TEST_CASE("constant function cannot pass the outside-mass condition") {
  const auto f = PointFunction::constant(k3_space(2), 0.4);
  const RefinementWitness w{CoordinateSet{}, {WitnessEntry{0, CoordinateSet{1}, {0}}}};
  const auto d = verify_witness(f, 1, w);
  CHECK_FALSE(d.accepted);
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].sparse_ok);
  CHECK_FALSE(d.entries[0].outside_ok);
}

TEST_CASE("planted witness") {
  const auto f = dictatorship(k3_space(2), 1);
  const RefinementWitness w{CoordinateSet{}, {WitnessEntry{0, CoordinateSet{1}, {0}}}};
  const auto d = verify_witness(f, 1, w);
  CHECK(d.accepted);
  CHECK(d.alpha == doctest::Approx(1.0 / 3));
  CHECK(d.covered == doctest::Approx(1.0 / 3));
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].pr_inside == doctest::Approx(1.0 / 3));
  CHECK(d.entries[0].outside_mean == 0.0);
}

TEST_CASE("malformed witnesses are reported, not thrown") {
  const auto f = dictatorship(k3_space(2), 1);
  const RefinementWitness overlap{CoordinateSet{1}, {WitnessEntry{0, CoordinateSet{1}, {0}}}};
  CHECK_FALSE(verify_witness(f, 1, overlap).shape_error.empty());
  const RefinementWitness too_big{CoordinateSet{}, {WitnessEntry{0, CoordinateSet{0, 1}, {0}}}};
  CHECK_FALSE(verify_witness(f, 1, too_big).shape_error.empty());
}

TEST_CASE("search finds the planted witness") {
  const auto f = dictatorship(k3_space(3), 1);
  const auto s = find_refinement(f, CoordinateSet{}, 1, 0.1);
  REQUIRE(s.witness.has_value());
  REQUIRE(s.witness->entries.size() == 1);
  const auto& e = s.witness->entries[0];
  CHECK(e.cell == 0);
  CHECK(e.coords == CoordinateSet{1});
  CHECK(e.cells == std::vector<PointIndex>{0});
  CHECK(s.diagnostics.accepted);
}

TEST_CASE("search finds nothing when f is determined by I") {
  const auto f = dictatorship(k3_space(3), 1);
  CHECK_FALSE(find_refinement(f, CoordinateSet{1}, 1, 0.1).witness.has_value());
  const auto one = PointFunction::constant(k3_space(3), 1.0);
  CHECK_FALSE(find_refinement(one, CoordinateSet{}, 1, 0.1).witness.has_value());
}

TEST_CASE("refinement loop on a dictatorship") {
  const auto f = dictatorship(k3_space(3), 0);
  const auto t = refinement_loop(f, 1, 0.1);
  CHECK(t.accepted_steps == 1);
  CHECK(t.final_coords == CoordinateSet{0});
  CHECK(t.final_entropy == 0.0);
  CHECK(t.stop == RefinementStop::kNoWitness);
  CHECK(t.accepted_steps <= t.step_bound);
  CHECK(t.steps[0].gain >= t.alpha / 128 - kEntropyGainTolerance);
}

TEST_CASE("refinement loop on a constant stops at once") {
  const auto t = refinement_loop(PointFunction::constant(k3_space(3), 0.5), 1, 0.1);
  CHECK(t.accepted_steps == 0);
  CHECK(t.final_coords.empty());
  CHECK(t.stop == RefinementStop::kNoWitness);
}

TEST_CASE("step bound") {
  CHECK(refinement_step_bound(0.0) == 0);
  CHECK(refinement_step_bound(1.0) == 0);
  CHECK(refinement_step_bound(0.5) == static_cast<std::size_t>(std::ceil(128 * std::log(2.0))));
}

TEST_CASE("gamma composition and tower") {
  CHECK(gamma_step({0.0}, 1, 2).value == 1.0);
  CHECK(gamma_step({1.0}, 1, 2).value == 3.0);
  CHECK(gamma_step({3.0}, 1, 2).value == 11.0);
  CHECK(tower(0).value == 1.0);
  CHECK(tower(3).value == 16.0);
  CHECK(tower(4).value == 65536.0);
  CHECK(tower(5).astronomical);
  CHECK(to_string(tower(5)) == "astronomical(>1e300)");
  CHECK(gamma_step({2000.0}, 1, 2).astronomical);
}

TEST_CASE("delta2") {
  CHECK(delta2(1.0 / 6, 3, 0.5, 1.0) == doctest::Approx((1.0 / 216) * (1.0 / 64)).epsilon(1e-14));
}

TEST_CASE("schedule table") {
  const auto s = schedule(1.0, 0.1, 0.1, 10, k3_chain());
  CHECK(s.delta1 == doctest::Approx(0.1));
  CHECK(s.r2 == doctest::Approx(320.0));
  CHECK(s.compositions == refinement_step_bound(0.1));
  REQUIRE(s.gamma_iterates.size() >= 2);
  CHECK(s.gamma_iterates[0].value == 0.0);
  CHECK(s.gamma_iterates[1].value == 10.0);
  CHECK(s.k.astronomical);
  CHECK_FALSE(s.log10_delta2.has_value());
}

}  // TEST_SUITE
