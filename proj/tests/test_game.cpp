#include <cmath>

#include "doctest.h"
#include "fpdyn/errors.hpp"
#include "fpdyn/flow.hpp"
#include "fpdyn/game.hpp"
#include "fpdyn/sampling.hpp"

using namespace fpdyn;

TEST_SUITE("game_core") {

TEST_CASE("shapley matrices at beta 0") {
  const BimatrixGame g = make_shapley(0.0);
  CHECK(g.a() == Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(g.b() == Matrix{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  REQUIRE(g.beta());
  CHECK(*g.beta() == 0.0);
}

TEST_CASE("shapley entries at beta 0.5") {
  const BimatrixGame g = make_shapley(0.5);
  CHECK(g.a()(0, 2) == 0.5);
  CHECK(g.b()(0, 0) == -0.5);
  CHECK(g.b()(0, 1) == 1.0);
}

TEST_CASE("column and row sums at beta 1") {
  const BimatrixGame g = make_shapley(1.0);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(sum(g.a().col(k)) == doctest::Approx(2.0));
    CHECK(sum(g.b().row(k)) == doctest::Approx(0.0));
  }
}

TEST_CASE("beta out of range") {
  CHECK_THROWS_AS(make_shapley(-1.0), ParameterError);
  CHECK_THROWS_AS(make_shapley(1.2), ParameterError);
  CHECK_THROWS_AS(make_shapley(std::nan("")), ParameterError);
}

TEST_CASE("malformed games") {
  CHECK_THROWS_AS(BimatrixGame(Matrix{{1, 0}, {0, 1}}, Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), StructuralError);
  CHECK_THROWS_AS(BimatrixGame(Matrix{{1, 1}, {2, 2}}, Matrix{{1, 0}, {0, 1}}), StructuralError);
}

TEST_CASE("singular matrix that is injective on the simplex") {
  // B at beta 1 has zero row sums, yet p -> pB is one-to-one on the simplex
  const BimatrixGame g = make_shapley(1.0);
  CHECK(g.b_shift() > 0.0);
  CHECK(g.a_shift() == 0.0);
  const StateP p{SimplexPoint(Vec{0.2, 0.5, 0.3}), SimplexPoint(Vec{0.6, 0.1, 0.3})};
  const StateP q = p_from_v(g, utilities(g, p));
  CHECK(max_abs_diff(p.pA.components(), q.pA.components()) < 1e-12);
}

TEST_CASE("simplex points") {
  CHECK_NOTHROW(SimplexPoint(Vec{0.2, 0.3, 0.5}));
  CHECK_NOTHROW(SimplexPoint(Vec{-1e-13, 0.5, 0.5 + 1e-13}));
  CHECK_THROWS_AS(SimplexPoint(Vec{-0.1, 0.6, 0.5}), DomainError);
  CHECK_THROWS_AS(SimplexPoint(Vec{0.2, 0.2, 0.2}), DomainError);
  const SimplexPoint c = barycenter(3);
  CHECK(c[1] == doctest::Approx(1.0 / 3.0));
  CHECK(vertex(3, 2)[2] == 1.0);
}

TEST_CASE("utilities at the barycenter") {
  for (double beta : {-0.8, -0.2, 0.0, 0.4, 1.0}) {
    const BimatrixGame g = make_shapley(beta);
    const StateV v = utilities(g, {barycenter(3), barycenter(3)});
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(v.vA[k] == doctest::Approx((1 + beta) / 3));
      CHECK(v.vB[k] == doctest::Approx((1 - beta) / 3));
    }
  }
}

TEST_CASE("utilities at pure states") {
  StateV v = utilities(make_shapley(0.0), {barycenter(3), vertex(3, 0)});
  CHECK(v.vA == Vec{1, 0, 0});
  v = utilities(make_shapley(1.0), {vertex(3, 0), barycenter(3)});
  CHECK(v.vB == Vec{-1, 1, 0});
  CHECK_THROWS_AS(utilities(make_shapley(0.0), {barycenter(2), barycenter(3)}), StructuralError);
}

TEST_CASE("best response sets") {
  auto r = best_response_set({0.5, 0.3, 0.2}, 1e-9);
  CHECK(r.indices == std::vector<int>{0});
  CHECK(r.margin == doctest::Approx(0.2));
  r = best_response_set({0.4, 0.4, 0.2}, 1e-9);
  CHECK(r.indices == std::vector<int>{0, 1});
  CHECK(r.margin == 0.0);
  r = best_response_set({0.4, 0.4 - 1e-12, 0.2}, 1e-9);
  CHECK(r.indices == std::vector<int>{0, 1});
  CHECK_THROWS_AS(best_response_set({0.1, 0.2}, -1.0), ParameterError);
}

TEST_CASE("best responses ignore positive affine rescaling") {
  Rng rng(7);
  std::uniform_real_distribution<double> u(-1, 1), pos(0.1, 5.0);
  for (int k = 0; k < 300; ++k) {
    const Vec v{u(rng), u(rng), u(rng)};
    const double a = pos(rng), b = u(rng);
    const Vec w{a * v[0] + b, a * v[1] + b, a * v[2] + b};
    CHECK(best_response_set(v, 0.0).indices == best_response_set(w, 0.0).indices);
  }
}

TEST_CASE("interior equilibrium") {
  for (double beta : {-0.9, 0.0, 0.5, 1.0}) {
    const StateP e = interior_equilibrium(make_shapley(beta));
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(e.pA[k] == doctest::Approx(1.0 / 3.0));
      CHECK(e.pB[k] == doctest::Approx(1.0 / 3.0));
    }
  }
  const StateV v = utilities(make_shapley(0.5), interior_equilibrium(make_shapley(0.5)));
  CHECK(v.vA[0] == doctest::Approx(0.5));
  CHECK(v.vA[2] == doctest::Approx(0.5));
}

TEST_CASE("dominant strategy has no interior equilibrium") {
  // row 1 strictly dominates row 2; the equal-utility mixture for A lies off the simplex
  const BimatrixGame g(Matrix{{2, 3}, {1, 1}}, Matrix{{1, 2}, {3, 1}});
  try {
    interior_equilibrium(g);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.payload().size() == 2);
  }
}

TEST_CASE("transversality") {
  CHECK(check_transversality(make_shapley(0.5)).ok);
  const auto zero = check_transversality(make_shapley(0.0));
  CHECK_FALSE(zero.ok);
  CHECK_FALSE(zero.violations.empty());
  const auto one = check_transversality(make_shapley(1.0));
  CHECK_FALSE(one.ok);
  bool a_column = false;
  for (const auto& v : one.violations) a_column = a_column || v.matrix == Player::A;
  CHECK(a_column);
}

TEST_CASE("zero-sum certificate") {
  CHECK(zero_sum_certificate(golden_mean()) <= 1e-12);
  CHECK(zero_sum_certificate(0.0) > 0.3);
  for (double d : {-0.01, 0.01}) {
    const double r = zero_sum_certificate(golden_mean() + d);
    CHECK(r > 0.0);
    CHECK(r < 0.05);
  }
}

TEST_CASE("utility sums are constant on the simplex") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const double beta = -0.99 + 1.99 * k / 199.0;
    const BimatrixGame g = make_shapley(beta);
    const StateV v = utilities(g, sample_state(rng, 3));
    CHECK(std::abs(sum(v.vA) - (1 + beta)) <= 1e-10);
    CHECK(std::abs(sum(v.vB) - (1 - beta)) <= 1e-10);
  }
}

TEST_CASE("utilities and states round trip") {
  Rng rng(12);
  for (double beta : {-0.9, -0.5, 0.0, 0.3, 0.8, 1.0}) {
    const BimatrixGame g = make_shapley(beta);
    for (int k = 0; k < 100; ++k) {
      const StateP p = sample_state(rng, 3);
      const StateP q = p_from_v(g, utilities(g, p));
      CHECK(max_abs_diff(p.pA.components(), q.pA.components()) <= 1e-10);
      CHECK(max_abs_diff(p.pB.components(), q.pB.components()) <= 1e-10);
    }
  }
}

}
