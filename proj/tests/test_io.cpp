#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "fpdyn/errors.hpp"
#include "fpdyn/io.hpp"
#include "fpdyn/sampling.hpp"
#include "json.hpp"

using namespace fpdyn;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

Trajectory sample_run(double beta, std::uint64_t seed, std::size_t events) {
  Rng rng(seed);
  SimConfig cfg;
  cfg.max_events = events;
  return simulate(make_shapley(beta), sample_state(rng, 3), cfg);
}

}  // namespace

TEST_SUITE("cli_app") {

TEST_CASE("game specs") {
  CHECK(*parse_game_spec(R"({"family":"shapley","beta":0.25})").beta() == 0.25);
  const BimatrixGame g = parse_game_spec(R"({"A":[[1,0],[0,1]],"B":[[0,1],[1,0]]})");
  CHECK(g.n() == 2);
  CHECK_FALSE(g.beta());
  CHECK_THROWS_AS(parse_game_spec("{"), ParameterError);
  CHECK_THROWS_AS(parse_game_spec(R"({"family":"other","beta":0.2})"), ParameterError);
  CHECK_THROWS_AS(parse_game_spec(R"({"family":"shapley","beta":3})"), ParameterError);
  CHECK_THROWS_AS(parse_game_spec(R"({"A":[[1,"x"],[0,1]],"B":[[0,1],[1,0]]})"), ParameterError);
  CHECK_THROWS_AS(parse_game_spec(R"({"A":[[1,1],[2,2]],"B":[[0,1],[1,0]]})"), ParameterError);
}

TEST_CASE("trajectory csv") {
  const BimatrixGame g = make_shapley(-0.5);
  const Trajectory t = sample_run(-0.5, 3, 50);
  const auto ls = lines(trajectory_csv(g, t));
  REQUIRE(ls.size() >= 52);
  CHECK(ls[0] == kTrajectoryHeader);
  CHECK(ls[1].rfind("0,0,0,", 0) == 0);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(std::count(ls[i].begin(), ls[i].end(), ',') == 17);
}

TEST_CASE("itinerary json") {
  const Trajectory t = sample_run(0.8, 4, 80);
  const auto it = itinerary(t);
  const auto j = nlohmann::json::parse(itinerary_json(it));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == it.size());
  for (const auto& e : j) {
    CHECK(e.contains("A"));
    CHECK(e.contains("B"));
    CHECK(e["duration_s"].is_number());
  }
  if (it.front().region) CHECK(j[0]["A"] == it.front().region->a + 1);
}

TEST_CASE("diagram and attraction json") {
  const auto d = nlohmann::json::parse(diagram_json(diagram_for(0.5)));
  CHECK(d["regime"] == "beta_positive");
  CHECK(d["arcs"].size() == diagram_for(0.5).arcs.size());
  const auto a = nlohmann::json::parse(attraction_json(attraction_check(-0.5, 20, 300, 1)));
  CHECK(a["converged_fraction"] == 1.0);
}

TEST_CASE("scan rows") {
  const std::string header = kScanHeader;
  const auto fields = std::count(header.begin(), header.end(), ',');
  for (double beta : {-0.5, golden_mean(), 0.8}) {
    const std::string row = scan_csv_row(scan_point(beta));
    CHECK(std::count(row.begin(), row.end(), ',') == fields);
  }
  CHECK(scan_point(-0.5).kind == "clockwise");
  CHECK(scan_point(0.8).kind == "anticlockwise");
  CHECK_FALSE(scan_point(golden_mean()).exists);
}

TEST_CASE("event labels carry no commas") {
  const Trajectory t = sample_run(0.5, 9, 100);
  for (const auto& s : t.segments) {
    const std::string l = event_label(s.end_event);
    CHECK(l.find(',') == std::string::npos);
  }
}

TEST_CASE("same seed, same output") {
  const BimatrixGame g = make_shapley(-0.5);
  CHECK(trajectory_csv(g, sample_run(-0.5, 7, 300)) == trajectory_csv(g, sample_run(-0.5, 7, 300)));
}

}
