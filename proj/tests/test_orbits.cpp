#include <cmath>

#include "doctest.h"
#include "fpdyn/errors.hpp"
#include "fpdyn/orbits.hpp"
#include "fpdyn/sampling.hpp"
#include "reference_flow.hpp"

using namespace fpdyn;

namespace {

// printed clockwise cubic, solved by plain bisection on (0,1)
double clockwise_root(double b) {
  auto f = [b](double z) {
    return (3 * b * b + 3 * b + 3) * z * z * z + (2 * b * b * b - 2 * b * b - 5 * b - 4) * z * z +
           (-b * b * b + 4 * b + 3) * z - 1 - b;
  };
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

reference::Flow reference_on(const PeriodicOrbitSpec& o) {
  reference::Flow f(reference::shapley_a(o.beta), reference::shapley_b(o.beta),
                    {o.section_n[0], o.section_n[1], o.section_n[2]}, {o.section_m[0], o.section_m[1], o.section_m[2]});
  f.i = o.full_path.front().play_a.pure;
  f.j = o.full_path.front().play_b.pure;
  return f;
}

// six switches of the reference flow bring the section back onto itself
void check_closes(const PeriodicOrbitSpec& o) {
  reference::Flow f = reference_on(o);
  for (int k = 0; k < 6; ++k) {
    const reference::Switch sw = f.step();
    REQUIRE(sw.player != '-');
    CHECK(sw.s == doctest::Approx(k % 2 == 0 ? o.t1 : o.t2).epsilon(1e-9));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(std::abs(f.va[c] - o.section_n[c]) < 1e-9);
    CHECK(std::abs(f.vb[c] - o.section_m[c]) < 1e-9);
  }
}

}  // namespace

TEST_SUITE("orbit_analysis") {

TEST_CASE("cubic sign patterns") {
  for (int k = 0; k < 100; ++k) {
    const double b = -0.99 + 1.98 * (k + 0.5) / 100.0;
    const Cubic cw = clockwise_cubic(b);
    CHECK(eval_cubic(cw, 0) == doctest::Approx(-1 - b));
    CHECK(eval_cubic(cw, 1) == doctest::Approx(b * b * b + b * b + b + 1));
    const Cubic acw = anticlockwise_cubic(b);
    CHECK(eval_cubic(acw, 0) == doctest::Approx(-b * b));
    CHECK(eval_cubic(acw, 1.0 / 3) == doctest::Approx(2 * b * b * b / 9 + 1.0 / 9));
    if (b > 0) CHECK(eval_cubic(acw, 1) < 0);
  }
}

TEST_CASE("clockwise orbit at beta 0") {
  const PeriodicOrbitSpec o = clockwise_orbit(0.0);
  CHECK(o.root == doctest::Approx(clockwise_root(0.0)).epsilon(1e-12));
  CHECK(o.section_n[0] > std::max(o.section_n[1], o.section_n[2]));
  CHECK(o.section_m[0] == doctest::Approx(o.section_m[1]));
  CHECK(o.section_m[0] > o.section_m[2]);
  CHECK(o.full_path.size() == 6);
  CHECK(o.closure_residual < 1e-9);
  CHECK(o.t1 == doctest::Approx(0.31767).epsilon(1e-4));
  check_closes(o);
}

TEST_CASE("clockwise orbits close under the reference flow") {
  for (double beta : {-0.9, -0.5, 0.3, 0.6}) {
    const PeriodicOrbitSpec o = clockwise_orbit(beta);
    CHECK(o.root == doctest::Approx(clockwise_root(beta)).epsilon(1e-10));
    check_closes(o);
  }
}

TEST_CASE("the reference flow is attracted to the clockwise section") {
  Rng rng(41);
  for (double beta : {-0.5, 0.0}) {
    const PeriodicOrbitSpec o = clockwise_orbit(beta);
    const BimatrixGame g = make_shapley(beta);
    for (int k = 0; k < 5; ++k) {
      const StateV v = utilities(g, sample_state(rng, 3));
      reference::Flow f(reference::shapley_a(beta), reference::shapley_b(beta), {v.vA[0], v.vA[1], v.vA[2]},
                        {v.vB[0], v.vB[1], v.vB[2]});
      double last = 1.0;
      for (int s = 0; s < 600; ++s) {
        const reference::Switch sw = f.step();
        REQUIRE(sw.player != '-');
        if (sw.player == 'B' && sw.to == o.full_path.front().play_b.pure && f.i == o.full_path.front().play_a.pure) {
          last = 0.0;
          for (std::size_t c = 0; c < 3; ++c)
            last = std::max({last, std::abs(sw.va[c] - o.section_n[c]), std::abs(sw.vb[c] - o.section_m[c])});
        }
      }
      CHECK(last < 1e-6);
    }
  }
}

TEST_CASE("clockwise existence") {
  CHECK_THROWS_AS(clockwise_orbit(0.7), ExistenceError);
  CHECK_THROWS_AS(anticlockwise_orbit(0.5), ExistenceError);
  CHECK_THROWS_AS(clockwise_orbit(-1.0), ParameterError);
}

TEST_CASE("clockwise orbit shrinks toward the golden mean") {
  const double s = golden_mean();
  double prev = 1.0;
  for (double d : {0.2, 0.1, 0.03, 0.01, 0.001}) {
    const PeriodicOrbitSpec o = clockwise_orbit(s - d);
    CHECK(o.diameter < prev);
    prev = o.diameter;
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(o.section_n[c] - (1 + s - d) / 3) < 2 * d);
  }
}

TEST_CASE("anticlockwise orbit at beta 1") {
  const PeriodicOrbitSpec o = anticlockwise_orbit(1.0);
  CHECK(o.section_m[1] == doctest::Approx(o.section_m[2]));
  CHECK(o.section_m[1] > o.section_m[0]);
  CHECK(o.section_n[0] > std::max(o.section_n[1], o.section_n[2]));
  CHECK((o.section_n[0] - o.section_n[1]) * o.beta > o.section_n[0] - o.section_n[2]);
  CHECK(std::abs(eval_cubic(anticlockwise_cubic(1.0), o.root)) < 1e-12);
  CHECK(std::abs(o.t1 - 0.12060) < 1e-4);
  CHECK(std::abs(o.t2 - 0.39493) < 1e-4);
  check_closes(o);
}

TEST_CASE("stability at beta 1") {
  const StabilityReport r = stability_matrix(1.0);
  const PeriodicOrbitSpec o = anticlockwise_orbit(1.0);
  const double ratio = o.section_n[1] / o.section_n[0];
  bool has_ratio = false;
  for (const auto& l : r.eigenvalues) has_ratio = has_ratio || std::abs(l - ratio) < 1e-9;
  CHECK(has_ratio);
  std::vector<double> re;
  for (const auto& l : r.eigenvalues) {
    CHECK(std::abs(l.imag()) < 1e-12);
    re.push_back(l.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(std::abs(re[0] + 0.815) < 2e-3);
  CHECK(std::abs(re[1] + 0.184) < 2e-3);
  CHECK(std::abs(re[2] - 0.532) < 2e-3);
  CHECK(r.classification == Stability::Attracting);
}

TEST_CASE("closed form and finite differences agree") {
  for (double beta : {0.8, 0.95}) {
    const PeriodicOrbitSpec o = anticlockwise_orbit(beta);
    const Matrix closed = anticlockwise_stability_closed_form(beta, o.section_n[0], o.section_n[1]);
    const Matrix fd = numerical_section_jacobian(o);
    CHECK((closed - fd).max_abs() < 1e-7);
    const auto pair = anticlockwise_eigenvalue_pair(beta, o.section_n[0], o.section_n[1]);
    const auto ev = eigenvalues3(closed);
    for (const auto& p : pair) {
      double best = 1.0;
      for (const auto& l : ev) best = std::min(best, std::abs(l - p));
      CHECK(best < 1e-9);
    }
  }
}

TEST_CASE("stability classes") {
  CHECK(stability_matrix(0.95).classification == Stability::Attracting);
  CHECK(stability_matrix(0.8).classification == Stability::SaddleType);
  CHECK(stability_matrix(-0.5).classification == Stability::Attracting);
  CHECK(stability_matrix(-0.5).numerical);
  CHECK_THROWS_AS(stability_matrix(golden_mean()), ExistenceError);
}

TEST_CASE("tau") {
  const TauResult t = find_tau();
  CHECK(std::abs(t.tau - 0.915) < 1e-3);
  CHECK(std::abs(t.g) <= 1e-6);
  const TauResult coarse = find_tau(golden_mean() + 0.01, 0.99, 1e-3);
  CHECK(std::abs(coarse.tau - t.tau) < 1e-3);
  CHECK(coarse.iterations < t.iterations);
  CHECK_THROWS_AS(find_tau(0.92, 0.99), SearchError);
}

TEST_CASE("gap map derivative and fixed point") {
  CHECK(j_map_derivative_at_zero(golden_mean()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j_map_derivative_at_zero(0.8) == doctest::Approx(4.68 / 3.36).epsilon(1e-12));
  CHECK(j_fixed_point(1.0) == doctest::Approx(0.25).epsilon(1e-14));
  const double x = j_fixed_point(0.8);
  CHECK(j_map_F(0.8, x) == doctest::Approx(x).epsilon(1e-14));
}

TEST_CASE("orbit on J") {
  const JOrbitSpec one = j_orbit(1.0);
  CHECK(std::abs(one.ratio_b - 1.0 / 3) < 1e-9);
  CHECK(std::abs(one.ratio_a - 1.0 / 4) < 1e-9);
  CHECK(std::abs(one.ratio_b_from_n1 - 1.0 / 3) < 1e-9);
  CHECK(std::abs(one.ratio_a_from_n1 - 1.0 / 4) < 1e-9);
  const JOrbitSpec j = j_orbit(0.8);
  CHECK(j.orbit.closure_residual < 1e-9);
  CHECK(j.endpoints.size() == 6);
  const double b = 0.8;
  CHECK(j.ratio_b == doctest::Approx((b * b + b - 1) / (2 * b + 1)).epsilon(1e-12));
  CHECK(j.ratio_a == doctest::Approx((b * b + b - 1) / ((1 + b) * (1 + b))).epsilon(1e-12));
  CHECK_THROWS_AS(j_orbit(golden_mean()), ExistenceError);
}

TEST_CASE("J orbit grows linearly past the golden mean") {
  const double s = golden_mean();
  const double r1 = j_orbit(s + 0.01).ratio_b, r2 = j_orbit(s + 0.02).ratio_b;
  CHECK(r1 > 0.0);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.05));
}

}
