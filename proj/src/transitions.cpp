#include "fpdyn/transitions.hpp"

#include "fpdyn/errors.hpp"

namespace fpdyn {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::BetaNegative: return "beta_negative";
    case Regime::BetaZero: return "beta_zero";
    case Regime::BetaPositive: return "beta_positive";
  }
  return "?";
}

namespace {

using Pairs = std::vector<std::array<int, 4>>;  // 1-based i,j -> k,l

std::set<Arc> arcs_from(const Pairs& p) {
  std::set<Arc> out;
  for (const auto& a : p) out.insert(Arc{RegionLabel{a[0] - 1, a[1] - 1}, RegionLabel{a[2] - 1, a[3] - 1}});
  return out;
}

// Checkerboard diagrams; the six-cycle first, then the remaining exits.
const Pairs kNegativeArcs{
    {1, 2, 2, 2}, {2, 2, 2, 3}, {2, 3, 3, 3}, {3, 3, 3, 1}, {3, 1, 1, 1}, {1, 1, 1, 2},
    {1, 3, 2, 3}, {1, 3, 3, 3}, {1, 3, 1, 1}, {1, 3, 1, 2},
    {2, 1, 1, 1}, {2, 1, 3, 1}, {2, 1, 2, 2}, {2, 1, 2, 3},
    {3, 2, 1, 2}, {3, 2, 2, 2}, {3, 2, 3, 1}, {3, 2, 3, 3},
};

const Pairs kZeroArcs{
    {1, 2, 2, 2}, {2, 2, 2, 3}, {2, 3, 3, 3}, {3, 3, 3, 1}, {3, 1, 1, 1}, {1, 1, 1, 2},
    {1, 3, 3, 3}, {1, 3, 1, 2}, {2, 1, 1, 1}, {2, 1, 2, 3}, {3, 2, 2, 2}, {3, 2, 3, 1},
};

const Pairs kPositiveArcs{
    {1, 2, 2, 2}, {2, 2, 2, 3}, {2, 3, 3, 3}, {3, 3, 3, 1}, {3, 1, 1, 1}, {1, 1, 1, 2},
    {1, 1, 1, 3}, {1, 2, 3, 2}, {1, 3, 1, 2}, {1, 3, 3, 3},
    {2, 1, 1, 1}, {2, 1, 2, 3}, {2, 2, 2, 1}, {2, 3, 1, 3},
    {3, 1, 2, 1}, {3, 2, 2, 2}, {3, 2, 3, 1}, {3, 3, 3, 2},
};

// through the z corners (T pieces) for beta > 0
const Pairs kPositiveCorners{{3, 2, 2, 1}, {1, 3, 3, 2}, {2, 1, 1, 3}};
// through the J pieces for beta < 0 (not drawn in the figure; they skip one cycle region)
const Pairs kNegativeCorners{{3, 1, 1, 2}, {1, 1, 2, 2}, {1, 2, 2, 3}, {2, 2, 3, 3}, {2, 3, 3, 1}, {3, 3, 1, 1}};
// dashed faces at beta = 0 where the transversality condition fails
const Pairs kZeroFaces{{1, 1, 1, 3}, {2, 1, 2, 2}, {3, 2, 3, 3}, {1, 2, 3, 2}, {1, 3, 2, 3}, {2, 1, 3, 1}};

}  // namespace

bool TransitionDiagram::allows(const RegionLabel& from, const RegionLabel& to) const {
  return arcs.count({from, to}) > 0 || corner_crossings.count({from, to}) > 0;
}

bool TransitionDiagram::spiral_corner(const JLeg& leg) const {
  const auto it = corners.find({leg.pair_a, leg.pair_b});
  return it != corners.end() && it->second == CornerType::Spiral;
}

TransitionDiagram diagram_for(double beta) {
  if (!(beta > -1.0 && beta <= 1.0)) throw ParameterError("beta must lie in (-1, 1]");
  TransitionDiagram d;
  if (beta < 0) {
    d.regime = Regime::BetaNegative;
    d.arcs = arcs_from(kNegativeArcs);
    d.corner_crossings = arcs_from(kNegativeCorners);
    for (const auto& l : j_legs()) d.corners[{l.pair_a, l.pair_b}] = CornerType::Transversal;
  } else if (beta == 0) {
    d.regime = Regime::BetaZero;
    d.arcs = arcs_from(kZeroArcs);
    d.ambiguous_faces = arcs_from(kZeroFaces);
  } else {
    d.regime = Regime::BetaPositive;
    d.arcs = arcs_from(kPositiveArcs);
    d.corner_crossings = arcs_from(kPositiveCorners);
    for (const auto& l : j_legs()) d.corners[{l.pair_a, l.pair_b}] = CornerType::Spiral;
    for (const auto& l : t_legs()) d.corners[{l.pair_a, l.pair_b}] = CornerType::Transversal;
    d.degenerate_exits = beta == 1.0;
  }
  return d;
}

const NamedPattern& shapley_pattern() {
  static const NamedPattern p{"Shapley", {{{0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}, {0, 0}}}};
  return p;
}

const NamedPattern& anti_shapley_pattern() {
  static const NamedPattern p{"AntiShapley", {{{0, 2}, {0, 1}, {2, 1}, {2, 0}, {1, 0}, {1, 2}}}};
  return p;
}

std::optional<std::size_t> validate_itinerary(const std::vector<ItineraryEntry>& it,
                                              const TransitionDiagram& diagram) {
  for (std::size_t k = 1; k < it.size(); ++k) {
    const auto& prev = it[k - 1];
    const auto& cur = it[k];
    bool ok = false;
    if (prev.region && cur.region) {
      ok = diagram.allows(*prev.region, *cur.region);
    } else if (prev.region && cur.leg) {
      ok = diagram.spiral_corner(*cur.leg) && cur.leg->pair_a.contains(prev.region->a) &&
           cur.leg->pair_b.contains(prev.region->b);
    } else if (prev.leg && cur.leg) {
      ok = prev.leg->family == LegFamily::J && cur.leg->family == LegFamily::J &&
           cur.leg->id == prev.leg->id % 6 + 1 && diagram.spiral_corner(*cur.leg);
    }
    if (!ok) return k;
  }
  return std::nullopt;
}

bool pattern_match(const std::vector<ItineraryEntry>& it, const NamedPattern& pattern, std::size_t min_repeats) {
  const std::size_t need = 6 * std::max<std::size_t>(min_repeats, 1);
  if (it.size() < need) return false;
  const std::size_t base = it.size() - need;
  for (std::size_t shift = 0; shift < 6; ++shift) {
    bool all = true;
    for (std::size_t k = 0; k < need && all; ++k) {
      const auto& r = it[base + k].region;
      all = r && *r == pattern.sequence[(k + shift) % 6];
    }
    if (all) return true;
  }
  return false;
}

bool arc_realizable(const TransitionDiagram& diagram, const NamedPattern& pattern) {
  for (std::size_t k = 0; k < 6; ++k)
    if (diagram.arcs.count({pattern.sequence[k], pattern.sequence[(k + 1) % 6]}) == 0) return false;
  return true;
}

}  // namespace fpdyn
