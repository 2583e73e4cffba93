#include <map>

#include "doctest.h"
#include "fpdyn/errors.hpp"
#include "fpdyn/orbits.hpp"
#include "fpdyn/sampling.hpp"
#include "fpdyn/transitions.hpp"

using namespace fpdyn;

namespace {

std::vector<ItineraryEntry> run(double beta, std::uint64_t seed, std::size_t events) {
  Rng rng(seed);
  SimConfig cfg;
  cfg.max_events = events;
  return itinerary(simulate(make_shapley(beta), sample_state(rng, 3), cfg));
}

ItineraryEntry region(int a, int b) {
  ItineraryEntry e;
  e.region = RegionLabel{a - 1, b - 1};
  return e;
}

}  // namespace

TEST_SUITE("transition_graph") {

TEST_CASE("regimes") {
  CHECK(diagram_for(-0.5).regime == Regime::BetaNegative);
  CHECK(diagram_for(0.0).regime == Regime::BetaZero);
  CHECK(diagram_for(0.5).regime == Regime::BetaPositive);
  CHECK(diagram_for(1.0).degenerate_exits);
  CHECK_FALSE(diagram_for(0.5).degenerate_exits);
  CHECK_THROWS_AS(diagram_for(-1.0), ParameterError);
}

TEST_CASE("beta negative arcs funnel into the cycle") {
  const TransitionDiagram d = diagram_for(-0.5);
  CHECK(arc_realizable(d, shapley_pattern()));
  CHECK_FALSE(arc_realizable(d, anti_shapley_pattern()));
  // regions on the cycle have a single successor
  std::map<RegionLabel, int> outdeg;
  for (const auto& a : d.arcs) ++outdeg[a.from];
  for (const auto& r : shapley_pattern().sequence) CHECK(outdeg[r] == 1);
}

TEST_CASE("beta positive realizes both cycles") {
  const TransitionDiagram d = diagram_for(0.5);
  CHECK(arc_realizable(d, shapley_pattern()));
  CHECK(arc_realizable(d, anti_shapley_pattern()));
  int spiral = 0;
  for (const auto& [k, t] : d.corners) spiral += t == CornerType::Spiral;
  CHECK(spiral == 6);
  CHECK(d.corners.size() == 9);
}

TEST_CASE("ambiguous faces at beta 0") {
  const TransitionDiagram d = diagram_for(0.0);
  CHECK(d.ambiguous_faces.size() == 6);
  for (const auto& f : d.ambiguous_faces) CHECK(f.from < f.to);
}

TEST_CASE("simulated itineraries are valid") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CHECK_FALSE(validate_itinerary(run(-0.5, seed, 200), diagram_for(-0.5)));
    CHECK_FALSE(validate_itinerary(run(0.3, seed, 200), diagram_for(0.3)));
    CHECK_FALSE(validate_itinerary(run(0.0, seed, 200), diagram_for(0.0)));
  }
}

TEST_CASE("hand-built violation") {
  const std::vector<ItineraryEntry> it{region(1, 2), region(3, 3)};
  const auto v = validate_itinerary(it, diagram_for(-0.5));
  REQUIRE(v);
  CHECK(*v == 1);
}

TEST_CASE("J spiralling itinerary") {
  const JOrbitSpec j = j_orbit(0.8);
  SimConfig cfg;
  cfg.max_events = 40;
  const auto it = itinerary(simulate_from(make_shapley(0.8), j.endpoints[0], cfg));
  std::size_t legs = 0;
  for (const auto& e : it) legs += e.leg.has_value();
  CHECK(legs > 10);
  CHECK_FALSE(validate_itinerary(it, diagram_for(0.8)));
}

TEST_CASE("named patterns") {
  int shapley = 0, anti = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    shapley += pattern_match(run(-0.5, seed, 300), shapley_pattern(), 5);
    anti += pattern_match(run(0.95, seed, 600), anti_shapley_pattern(), 5);
  }
  CHECK(shapley == 5);
  CHECK(anti == 5);
  CHECK_FALSE(pattern_match({}, shapley_pattern(), 1));
  std::vector<ItineraryEntry> cyc;
  for (int k = 0; k < 12; ++k) {
    const RegionLabel r = shapley_pattern().sequence[static_cast<std::size_t>((k + 2) % 6)];
    cyc.push_back(region(r.a + 1, r.b + 1));
  }
  CHECK(pattern_match(cyc, shapley_pattern(), 2));
  CHECK_FALSE(pattern_match(cyc, shapley_pattern(), 3));
  CHECK_FALSE(pattern_match(cyc, anti_shapley_pattern(), 1));
}

}
