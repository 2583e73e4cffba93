#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fpdyn/flow.hpp"

namespace fpdyn {

enum class Regime { BetaNegative, BetaZero, BetaPositive };

std::string to_string(Regime r);

enum class CornerType { Spiral, Transversal };

struct Arc {
  RegionLabel from;
  RegionLabel to;
  auto operator<=>(const Arc&) const = default;
};

struct TransitionDiagram {
  Regime regime = Regime::BetaNegative;
  std::set<Arc> arcs;              // one player switches
  std::set<Arc> corner_crossings;  // both switch at a transversal corner
  std::map<std::pair<TiePair, TiePair>, CornerType> corners;  // keyed by (A pair, B pair)
  std::set<Arc> ambiguous_faces;   // non-transversal faces, stored with from < to
  bool degenerate_exits = false;   // beta = 1

  bool allows(const RegionLabel& from, const RegionLabel& to) const;
  bool spiral_corner(const JLeg& leg) const;
};

TransitionDiagram diagram_for(double beta);

struct NamedPattern {
  std::string name;
  std::array<RegionLabel, 6> sequence;
};

const NamedPattern& shapley_pattern();
const NamedPattern& anti_shapley_pattern();

// Index of the first entry that cannot follow its predecessor, if any.
std::optional<std::size_t> validate_itinerary(const std::vector<ItineraryEntry>& it,
                                              const TransitionDiagram& diagram);

bool pattern_match(const std::vector<ItineraryEntry>& it, const NamedPattern& pattern, std::size_t min_repeats);

// Whether the 6-cycle of `pattern` can be followed using arcs only.
bool arc_realizable(const TransitionDiagram& diagram, const NamedPattern& pattern);

}  // namespace fpdyn
