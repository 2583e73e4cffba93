#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fpdyn/errors.hpp"
#include "fpdyn/flow.hpp"
#include "fpdyn/orbits.hpp"
#include "fpdyn/sampling.hpp"
#include "reference_flow.hpp"

using namespace fpdyn;

namespace {

double gap_map(double b, double x) {
  const double q = 1 - b + b * b;
  return x * (1 + b) * (1 + 2 * b) * q / ((2 - b) * (3 * (1 + b) * (1 + b) * x + (2 + b) * q));
}

StateV on_j(double beta, double x) {
  const double lo = (1 + beta - 2 * x) / 3, hi = (1 + beta + x) / 3, b = (1 - beta) / 3;
  return {{lo, hi, hi}, {b, b, b}};
}

double spread(const Vec& v) { return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()); }

}  // namespace

TEST_SUITE("flow_engine") {

TEST_CASE("time conversion") {
  CHECK(s_to_rho(0.0) == 0.0);
  CHECK(s_to_rho(0.31767) == doctest::Approx(0.38225).epsilon(1e-4));
  CHECK(rho_to_s(std::log(2.0)) == doctest::Approx(0.5));
  CHECK(std::isinf(s_to_rho(1.0)));
  CHECK_THROWS_AS(s_to_rho(1.5), ParameterError);
  CHECK_THROWS_AS(rho_to_s(-1.0), ParameterError);
}

TEST_CASE("next event on the clockwise section at beta 0") {
  const PeriodicOrbitSpec o = clockwise_orbit(0.0);
  const StateV st{o.section_n, o.section_m};
  const NextEvent e = time_to_next_event(make_shapley(0.0), st, 1, 0);
  REQUIRE_FALSE(e.truncated);
  const double d = o.section_n[0] - o.section_n[1];
  CHECK(e.s == doctest::Approx(d / (d + 1)).epsilon(1e-12));
  CHECK(e.s == doctest::Approx(0.31767).epsilon(1e-4));
  REQUIRE(e.ties.size() == 1);
  CHECK(e.ties[0].player == Player::A);
  CHECK(e.ties[0].catcher == 1);

  const StateV mid = advance(st, make_shapley(0.0).a().col(1), make_shapley(0.0).b().row(0), e.s);
  CHECK(mid.vA[0] == doctest::Approx(mid.vA[1]).epsilon(1e-12));
  CHECK(mid.vA[0] == doctest::Approx(o.section_n[0] / (d + 1)).epsilon(1e-12));
}

TEST_CASE("next event on the anticlockwise section at beta 1") {
  const PeriodicOrbitSpec o = anticlockwise_orbit(1.0);
  const double d = o.section_n[0] - o.section_n[2];
  CHECK(o.t1 == doctest::Approx(d / (d + 1.0)).epsilon(1e-12));
  CHECK(std::abs(o.t1 - 0.12060) < 1e-4);
}

TEST_CASE("one-pair tie time") {
  const double g = 0.1;
  const StateV st{{0.5, 0.5 - g, 0.0}, {0.5, 0.2, 0.3}};
  const Vec ta{0.2, 0.6, 0.2}, tb{0.5, 0.2, 0.3};
  const NextEvent e = time_to_next_event(st, Play::pure_strategy(0), Play::pure_strategy(0), ta, tb);
  // gap closes linearly from g to -(0.6 - 0.2)
  CHECK(e.s == doctest::Approx(g / (g + 0.4)));
}

TEST_CASE("advance endpoints") {
  const StateV st{{0.2, 0.3, 0.5}, {0.1, 0.6, 0.3}};
  const Vec ta{1, 0, 0}, tb{0, 1, 0};
  const StateV s0 = advance(st, ta, tb, 0.0);
  CHECK(s0.vA == st.vA);
  const StateV s1 = advance(st, ta, tb, 1.0);
  CHECK(s1.vA == ta);
  CHECK(s1.vB == tb);
  CHECK_THROWS_AS(advance(st, ta, tb, 1.1), ParameterError);
}

TEST_CASE("utilities outside the simplex image") {
  const BimatrixGame g = make_shapley(0.0);
  CHECK_THROWS_AS(p_from_v(g, {{2, 0, 0}, {0.3, 0.3, 0.4}}), DomainError);
  const StateP e = p_from_v(g, {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  CHECK(e.pA[0] == doctest::Approx(1.0 / 3));
  CHECK(e.pB[2] == doctest::Approx(1.0 / 3));
}

TEST_CASE("start at the equilibrium") {
  const BimatrixGame g = make_shapley(0.4);
  const Trajectory t = simulate(g, interior_equilibrium(g));
  CHECK(t.segments.empty());
  CHECK(t.stop.kind == EventKind::EquilibriumReached);
}

TEST_CASE("simulator agrees with the reference flow") {
  Rng rng(31);
  for (double beta : {-0.7, -0.3, 0.3, 0.9}) {
    const BimatrixGame g = make_shapley(beta);
    for (int k = 0; k < 20; ++k) {
      const StateV v = utilities(g, sample_state(rng, 3));
      SimConfig cfg;
      cfg.max_events = 40;
      const Trajectory t = simulate_from(g, v, cfg);
      reference::Flow ref(reference::shapley_a(beta), reference::shapley_b(beta), {v.vA[0], v.vA[1], v.vA[2]},
                          {v.vB[0], v.vB[1], v.vB[2]});
      // compare until the library leaves the pure-strategy regime
      for (const auto& seg : t.segments) {
        if (seg.play_a.mixed() || seg.play_b.mixed()) break;
        CHECK(seg.play_a.pure == ref.i);
        CHECK(seg.play_b.pure == ref.j);
        const reference::Switch sw = ref.step();
        if (sw.player == '-') break;
        CHECK(seg.duration_s == doctest::Approx(sw.s).epsilon(1e-8));
        for (std::size_t c = 0; c < 3; ++c) {
          CHECK(seg.end.vA[c] == doctest::Approx(sw.va[c]).epsilon(1e-8));
          CHECK(seg.end.vB[c] == doctest::Approx(sw.vb[c]).epsilon(1e-8));
        }
        if (seg.end_event.kind != EventKind::SingleIndifference) break;
      }
    }
  }
}

TEST_CASE("trajectory properties") {
  Rng rng(32);
  for (double beta : {-0.9, -0.4, 0.2, 0.7, 0.95}) {
    const BimatrixGame g = make_shapley(beta);
    for (int k = 0; k < 30; ++k) {
      SimConfig cfg;
      cfg.max_events = 200;
      const Trajectory t = simulate(g, sample_state(rng, 3), cfg);
      for (std::size_t i = 0; i < t.segments.size(); ++i) {
        const Segment& s = t.segments[i];
        CHECK(std::abs(sum(s.end.vA) - (1 + beta)) <= 1e-9);
        CHECK(std::abs(sum(s.end.vB) - (1 - beta)) <= 1e-9);
        CHECK(s.duration_s >= 0.0);
        CHECK(s.duration_s <= 1.0);
        if (i > 0) CHECK(s.start.vA == t.segments[i - 1].end.vA);
        // the interior of a segment lies on the straight line to its targets
        const StateV mid = advance(s.start, s.target_a, s.target_b, 0.5 * s.duration_s);
        if (const auto r = s.region()) {
          CHECK(best_response_set(mid.vA, 0.0).indices == std::vector<int>{r->a});
          CHECK(best_response_set(mid.vB, 0.0).indices == std::vector<int>{r->b});
        }
      }
    }
  }
}

TEST_CASE("no codimension-two stop for beta > 0") {
  Rng rng(33);
  for (int k = 0; k < 200; ++k) {
    const double beta = 0.05 + 0.9 * (k % 10) / 9.0;
    SimConfig cfg;
    cfg.max_events = 150;
    const Trajectory t = simulate(make_shapley(beta), sample_state(rng, 3), cfg);
    CHECK(t.stop.kind != EventKind::DiscontinuityHit);
  }
}

TEST_CASE("non-transversal tie at beta 0") {
  // A ties on {2,3} while B plays 1, and column 1 of A = (1,0,0) keeps the tie
  const BimatrixGame g = make_shapley(0.0);
  const StateP p{SimplexPoint(Vec{0.2, 0.3, 0.5}), SimplexPoint(Vec{0.2, 0.4, 0.4})};
  CHECK_THROWS_AS(simulate(g, p), AmbiguityError);
}

TEST_CASE("gap map along J") {
  const double beta = 0.8, x = 0.05;
  const StateV a = j_flow_step(beta, on_j(beta, x)).end;
  const StateV b = j_flow_step(beta, a).end;
  CHECK(spread(b.vA) == doctest::Approx(gap_map(beta, x)).epsilon(1e-10));
  CHECK(j_map_F(beta, x) == doctest::Approx(gap_map(beta, x)).epsilon(1e-14));
  CHECK(max_abs_diff(b.vB, Vec(3, (1 - beta) / 3)) < 1e-12);
}

TEST_CASE("gaps shrink below the golden mean") {
  const double beta = 0.5;
  double x = 0.2;
  StateV st = on_j(beta, x);
  for (int k = 0; k < 5; ++k) {
    st = j_flow_step(beta, j_flow_step(beta, st).end).end;
    const double nx = spread(st.vA);
    CHECK(nx < x);
    x = nx;
  }
}

TEST_CASE("gap preserved at the fixed point") {
  const double beta = 0.8, xs = j_fixed_point(beta);
  const StateV b = j_flow_step(beta, j_flow_step(beta, on_j(beta, xs)).end).end;
  CHECK(std::abs(spread(b.vA) - xs) < 1e-10);
}

TEST_CASE("J flow preconditions") {
  const double e = 1.8 / 3, f = 0.2 / 3;
  CHECK_THROWS_AS(j_flow_step(0.8, {{e, e, e}, {f, f, f}}), AmbiguityError);
  CHECK_THROWS_AS(j_flow_step(-0.2, on_j(0.8, 0.1)), ParameterError);
  CHECK_THROWS_AS(j_flow_step(0.8, {{0.9, 0.5, 0.4}, {0.1, 0.05, 0.05}}), ParameterError);
}

TEST_CASE("configuration validation") {
  SimConfig c;
  c.tol_tie = 0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = {};
  c.codim2_policy = Codim2Policy::Perturb;
  c.perturb_eps = 1e-12;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

}
