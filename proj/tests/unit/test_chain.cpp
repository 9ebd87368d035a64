#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "removal/chain.hpp"
#include "removal/functions.hpp"
#include "removal/kneser.hpp"
#include "removal/random.hpp"
#include "removal/verify/oracles.hpp"

using namespace removal;

namespace {

std::shared_ptr<const BaseChain> k3() { return std::make_shared<const BaseChain>(k3_chain()); }

Matrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ChainViolation violation_of(const Matrix& m) {
  try {
    validate_chain(m);
  } catch (const ChainError& e) {
    return e.kind();
  }
  FAIL("chain unexpectedly valid");
  return ChainViolation::kTooFewStates;
}

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("k3 stationary measure is uniform") {
  const BaseChain c = k3_chain();
  REQUIRE(c.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(c.stationary()(i) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(c.w_min() == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK_FALSE(c.has_loop(0));
}

TEST_CASE("disjointness chain at p = 1/3") {
  const BaseChain c = disjointness_chain(1.0 / 3);
  CHECK(c.transition()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.transition()(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.transition()(1, 0) == 1.0);
  CHECK(c.stationary()(0) == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(c.stationary()(1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(c.edge_weight(0, 1) == doctest::Approx(c.edge_weight(1, 0)).epsilon(1e-15));
}

TEST_CASE("power iteration agrees with the dense solve") {
  const BaseChain c = disjointness_chain(0.25);
  const Vector pi = stationary_power_iteration(c.transition());
  CHECK((pi - c.stationary()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("validation names the violated property") {
  CHECK(violation_of(matrix({{1.0}})) == ChainViolation::kTooFewStates);
  CHECK(violation_of(matrix({{1, 0}, {0, 1}})) == ChainViolation::kReducible);
  CHECK(violation_of(matrix({{0, 1}, {1, 0}})) == ChainViolation::kPeriodic);
  CHECK(violation_of(matrix({{0.5, 0.6}, {1, 0}})) == ChainViolation::kNotRowStochastic);
  CHECK(violation_of(matrix({{1.5, -0.5}, {1, 0}})) == ChainViolation::kNegativeEntry);
  // Biased walk around a triangle: uniform stationary measure, unequal flows.
  CHECK(violation_of(matrix({{0, 0.6, 0.4}, {0.4, 0, 0.6}, {0.6, 0.4, 0}})) ==
        ChainViolation::kNotReversible);
}

TEST_CASE("period counts closed walks, not only simple cycles through state 0") {
  // 0 -> 1 -> 0 is the only simple cycle through 0, but the loop at 1 makes it aperiodic.
  CHECK(chain_period(matrix({{0, 1}, {0.5, 0.5}})) == 1);
  CHECK(chain_period(matrix({{0, 1}, {1, 0}})) == 2);
  CHECK(chain_period(matrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})) == 3);
  CHECK(chain_period(k3_chain().transition()) == 1);
}

TEST_CASE("eigenvalues") {
  const ChainSpectrum s = eigendecompose(k3_chain());
  REQUIRE(s.eigenvalues.size() == 3);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.eigenvalues[1] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(s.eigenvalues[2] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(s.lambda2 == doctest::Approx(0.5).epsilon(1e-14));
  for (int a = 0; a < 3; ++a) CHECK(s.basis(a, 0) == doctest::Approx(1.0).epsilon(1e-14));

  const ChainSpectrum d = eigendecompose(disjointness_chain(1.0 / 3));
  CHECK(d.eigenvalues[1] == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("eigenbasis is orthonormal under mu") {
  const BaseChain c = disjointness_chain(0.2);
  const ChainSpectrum s = eigendecompose(c);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double ip = 0.0;
      for (int x = 0; x < 2; ++x) ip += c.stationary()(x) * s.basis(x, a) * s.basis(x, b);
      CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("edge weight of the product chain") {
  ProductSpace sp(k3(), 2);
  const std::size_t d00[] = {0, 0};
  const std::size_t d11[] = {1, 1};
  const PointIndex x = sp.encode(d00);
  const PointIndex y = sp.encode(d11);
  CHECK(edge_weight(sp, x, y) == doctest::Approx(1.0 / 36).epsilon(1e-15));
  CHECK(edge_weight(sp, x, x) == 0.0);
  CHECK(sp.adjacent(x, y));
  CHECK_FALSE(sp.adjacent(x, x));

  ProductSpace cube = disjointness_space(1.0 / 3, 1);
  CHECK(edge_weight(cube, 0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(mu_pp(1, 1.0 / 3, 0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("neighbors are visited in ascending order") {
  ProductSpace sp(k3(), 2);
  std::vector<PointIndex> seen;
  sp.for_each_neighbor(0, [&](PointIndex y) { seen.push_back(y); });
  CHECK(seen == std::vector<PointIndex>{4, 5, 7, 8});
}

TEST_CASE("encode and digits round-trip") {
  ProductSpace sp(k3(), 4);
  for (PointIndex x = 0; x < sp.size(); ++x) {
    const auto d = sp.digits(x);
    CHECK(sp.encode(d) == x);
  }
  const std::size_t d[] = {2, 0, 0, 1};
  CHECK(sp.encode(d) == 2 * 27 + 1);
}

TEST_CASE("point caps are enforced") {
  CHECK_THROWS_AS(ProductSpace(k3(), 10, 1000), CapExceeded);
  CHECK_THROWS_AS(checked_power(3, 80, static_cast<std::size_t>(-1)), CapExceeded);
}

TEST_CASE("markov operator fixes constants") {
  ProductSpace sp(k3(), 3);
  std::vector<double> one(sp.size(), 1.0);
  const auto a1 = apply_markov(sp, one);
  for (double v : a1) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(quad_form(sp, one, one) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("product characters are eigenfunctions") {
  auto base = k3();
  const ChainSpectrum s = eigendecompose(*base);
  ProductSpace sp(base, 2);
  std::vector<double> chi(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) {
    const auto d = sp.digits(x);
    chi[x] = s.basis(d[0], 1) * s.basis(d[1], 2);
  }
  const auto a = apply_markov(sp, chi);
  const double lambda = s.eigenvalues[1] * s.eigenvalues[2];
  for (PointIndex x = 0; x < sp.size(); ++x) CHECK(a[x] == doctest::Approx(lambda * chi[x]).epsilon(1e-13));
}

TEST_CASE("planted edge value 1/18") {
  ProductSpace sp(k3(), 2);
  const PointIndex u[] = {0, 4};
  const PointFunction f = PointFunction::indicator(sp, u);
  CHECK(std::abs(quad_form(f, f) - 1.0 / 18) <= 1e-15);
  CHECK(std::abs(verify::quad_form_double_sum(sp, f.values(), f.values()) - 1.0 / 18) <= 1e-15);
}

TEST_CASE("dictatorship spans no edges") {
  ProductSpace sp(k3(), 3);
  std::vector<double> v(sp.size());
  for (PointIndex x = 0; x < sp.size(); ++x) v[x] = sp.digits(x)[0] == 0 ? 1.0 : 0.0;
  const PointFunction f(sp, v);
  CHECK(quad_form(f, f) == 0.0);
}

TEST_CASE("quadratic form matches the double sum on K3^3") {
  ProductSpace sp(k3(), 3);
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto f = verify::random_values(sp.size(), rng);
    const auto g = verify::random_values(sp.size(), rng);
    CHECK(std::abs(quad_form(sp, f, g) - verify::quad_form_double_sum(sp, f, g)) <= 1e-12);
  }
}

}  // TEST_SUITE
