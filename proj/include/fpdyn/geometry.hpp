#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fpdyn/game.hpp"

namespace fpdyn {

// Strategies are 0-based internally; I/O is 1-based.
struct RegionLabel {
  int a = 0;  // A's strict best response
  int b = 0;  // B's strict best response
  auto operator<=>(const RegionLabel&) const = default;
};

std::string to_string(const RegionLabel& r);  // "i,j", 1-based

// Unordered pair of distinct strategies, stored with first < second.
struct TiePair {
  int first = 0;
  int second = 1;
  TiePair() = default;
  TiePair(int i, int j);
  int other(int k) const { return k == first ? second : first; }
  bool contains(int k) const { return k == first || k == second; }
  int third() const { return 3 - first - second; }  // 3-strategy games only
  auto operator<=>(const TiePair&) const = default;
};

std::string to_string(const TiePair& p);  // "{i,j}", 1-based

enum class LegFamily { J, T };

struct JLeg {
  LegFamily family = LegFamily::J;
  int id = 1;  // 1..6 for J, 1..3 for T, in the cyclic order of the definitions
  TiePair pair_a;
  TiePair pair_b;
  auto operator<=>(const JLeg&) const = default;
};

std::string to_string(const JLeg& leg);

// The six J pieces in cyclic order, then the three T pieces.
const std::array<JLeg, 6>& j_legs();
const std::array<JLeg, 3>& t_legs();
std::optional<JLeg> leg_for_pairs(TiePair pair_a, TiePair pair_b);

struct TieReport {
  BestResponseSet a;
  BestResponseSet b;
  bool at_equilibrium() const;  // both players tie on all strategies
  bool in_z_star() const { return !a.strict() && !b.strict(); }
  std::optional<JLeg> leg;
};

using RegionOrTie = std::variant<RegionLabel, TieReport>;

RegionOrTie region_of(const StateV& state, double tol = kTieTol);
std::optional<JLeg> j_leg_of(const StateV& state, double tol = kTieTol);

// Segment of an indifference set: `player` is indifferent between `pair`;
// the segment lives in the opponent's simplex and joins E to the boundary.
struct IndifferenceLocus {
  Player player;
  TiePair pair;
  Vec from;  // E
  Vec to;    // boundary endpoint
};

struct NamedPoint {
  std::string name;
  Player simplex;  // simplex the point lives in
  Vec p;
};

struct IndifferenceAnchors {
  std::vector<IndifferenceLocus> loci;  // three for each player
  std::vector<NamedPoint> q_points;      // only for beta > 0
};

IndifferenceAnchors indifference_anchors(double beta);

struct RestrictedGame2x2 {
  TiePair pair_a;  // rows: A's tied strategies
  TiePair pair_b;  // columns: B's tied strategies
  std::array<std::array<double, 2>, 2> a_sub{};
  std::array<std::array<double, 2>, 2> b_sub{};
};

enum class Codim2Case { Crossing, SpiralStable, Saddle };

std::string to_string(Codim2Case c);

RestrictedGame2x2 restricted_game(const BimatrixGame& game, TiePair pair_a, TiePair pair_b);
RestrictedGame2x2 make_restricted(const std::array<std::array<double, 2>, 2>& a_sub,
                                  const std::array<std::array<double, 2>, 2>& b_sub);

// Interior equilibrium test from payoff differences; throws ClassificationError
// when a difference vanishes.
Codim2Case classify_codim2(const RestrictedGame2x2& rg);

// For Crossing games: the unique consistent pure pair, as (row, col) in 0/1
// positions of the restricted game.
std::pair<int, int> crossing_target(const RestrictedGame2x2& rg);

}  // namespace fpdyn
