#include "fpdyn/geometry.hpp"

#include <cmath>

#include "fpdyn/errors.hpp"

namespace fpdyn {

std::string to_string(const RegionLabel& r) { return std::to_string(r.a + 1) + "," + std::to_string(r.b + 1); }

TiePair::TiePair(int i, int j) : first(std::min(i, j)), second(std::max(i, j)) {
  if (i == j) throw ParameterError("tie pair needs two distinct strategies");
  if (i < 0 || j < 0) throw ParameterError("negative strategy index");
}

std::string to_string(const TiePair& p) {
  return "{" + std::to_string(p.first + 1) + "," + std::to_string(p.second + 1) + "}";
}

std::string to_string(const JLeg& leg) {
  return std::string(leg.family == LegFamily::J ? "J" : "T") + std::to_string(leg.id) + " (B" +
         to_string(leg.pair_b) + " x A" + to_string(leg.pair_a) + ")";
}

const std::array<JLeg, 6>& j_legs() {
  // B{1,2}xA{3,1}, B{1,2}xA{1,2}, B{2,3}xA{1,2}, B{2,3}xA{2,3}, B{3,1}xA{2,3}, B{3,1}xA{3,1}
  static const std::array<JLeg, 6> legs{{
      {LegFamily::J, 1, TiePair(0, 2), TiePair(0, 1)},
      {LegFamily::J, 2, TiePair(0, 1), TiePair(0, 1)},
      {LegFamily::J, 3, TiePair(0, 1), TiePair(1, 2)},
      {LegFamily::J, 4, TiePair(1, 2), TiePair(1, 2)},
      {LegFamily::J, 5, TiePair(1, 2), TiePair(0, 2)},
      {LegFamily::J, 6, TiePair(0, 2), TiePair(0, 2)},
  }};
  return legs;
}

const std::array<JLeg, 3>& t_legs() {
  // B{1,2}xA{2,3}, B{2,3}xA{3,1}, B{3,1}xA{1,2}
  static const std::array<JLeg, 3> legs{{
      {LegFamily::T, 1, TiePair(1, 2), TiePair(0, 1)},
      {LegFamily::T, 2, TiePair(0, 2), TiePair(1, 2)},
      {LegFamily::T, 3, TiePair(0, 1), TiePair(0, 2)},
  }};
  return legs;
}

std::optional<JLeg> leg_for_pairs(TiePair pair_a, TiePair pair_b) {
  for (const auto& l : j_legs())
    if (l.pair_a == pair_a && l.pair_b == pair_b) return l;
  for (const auto& l : t_legs())
    if (l.pair_a == pair_a && l.pair_b == pair_b) return l;
  return std::nullopt;
}

bool TieReport::at_equilibrium() const {
  return a.indices.size() == 3 && b.indices.size() == 3;
}

RegionOrTie region_of(const StateV& state, double tol) {
  TieReport rep{best_response_set(state.vA, tol, Player::A), best_response_set(state.vB, tol, Player::B),
                std::nullopt};
  if (rep.a.strict() && rep.b.strict()) return RegionLabel{rep.a.indices[0], rep.b.indices[0]};
  if (rep.a.indices.size() == 2 && rep.b.indices.size() == 2 && state.vA.size() == 3)
    rep.leg = leg_for_pairs(TiePair(rep.a.indices[0], rep.a.indices[1]),
                            TiePair(rep.b.indices[0], rep.b.indices[1]));
  return rep;
}

std::optional<JLeg> j_leg_of(const StateV& state, double tol) {
  const auto r = region_of(state, tol);
  if (const auto* t = std::get_if<TieReport>(&r)) return t->leg;
  return std::nullopt;
}

IndifferenceAnchors indifference_anchors(double beta) {
  if (!(beta > -1.0 && beta <= 1.0)) throw ParameterError("beta must lie in (-1, 1]");
  const Vec e(3, 1.0 / 3.0);
  auto rot = [](const Vec& v, int k) {
    Vec out(3);
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>((i + k) % 3)] = v[static_cast<std::size_t>(i)];
    return out;
  };
  IndifferenceAnchors anchors;
  const Vec za = (1.0 / (2.0 - beta)) * Vec{1.0, 1.0 - beta, 0.0};  // on Z^A_{12}, in Sigma_B
  const Vec zb = (1.0 / (2.0 + beta)) * Vec{1.0 + beta, 1.0, 0.0};  // on Z^B_{23}, in Sigma_A
  for (int k = 0; k < 3; ++k) {
    anchors.loci.push_back({Player::A, TiePair(k % 3, (k + 1) % 3), e, rot(za, k)});
  }
  for (int k = 0; k < 3; ++k) {
    anchors.loci.push_back({Player::B, TiePair((k + 1) % 3, (k + 2) % 3), e, rot(zb, k)});
  }
  if (beta > 0.0) {
    const Vec qa = (1.0 / (1.0 + 2.0 * beta)) * Vec{beta, 1.0 + beta, 0.0};  // Q^A_{12}
    const Vec qb = (1.0 / (1.0 + beta)) * Vec{beta, 1.0, 0.0};               // Q^B_{13}
    for (int k = 0; k < 3; ++k) {
      const TiePair pa(k % 3, (k + 1) % 3);
      const TiePair pb(k % 3, (k + 2) % 3);
      anchors.q_points.push_back({"Q^A_" + std::to_string(pa.first + 1) + std::to_string(pa.second + 1),
                                  Player::A, rot(qa, k)});
      anchors.q_points.push_back({"Q^B_" + std::to_string(pb.first + 1) + std::to_string(pb.second + 1),
                                  Player::B, rot(qb, k)});
    }
  }
  return anchors;
}

std::string to_string(Codim2Case c) {
  switch (c) {
    case Codim2Case::Crossing: return "Crossing";
    case Codim2Case::SpiralStable: return "SpiralStable";
    case Codim2Case::Saddle: return "Saddle";
  }
  return "?";
}

RestrictedGame2x2 restricted_game(const BimatrixGame& game, TiePair pair_a, TiePair pair_b) {
  const int n = static_cast<int>(game.n());
  if (pair_a.second >= n || pair_b.second >= n) throw ParameterError("strategy index out of range");
  RestrictedGame2x2 rg;
  rg.pair_a = pair_a;
  rg.pair_b = pair_b;
  const std::array<int, 2> rows{pair_a.first, pair_a.second};
  const std::array<int, 2> cols{pair_b.first, pair_b.second};
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) {
      rg.a_sub[r][c] = game.a()(static_cast<std::size_t>(rows[r]), static_cast<std::size_t>(cols[c]));
      rg.b_sub[r][c] = game.b()(static_cast<std::size_t>(rows[r]), static_cast<std::size_t>(cols[c]));
    }
  return rg;
}

RestrictedGame2x2 make_restricted(const std::array<std::array<double, 2>, 2>& a_sub,
                                  const std::array<std::array<double, 2>, 2>& b_sub) {
  RestrictedGame2x2 rg;
  rg.a_sub = a_sub;
  rg.b_sub = b_sub;
  return rg;
}

namespace {

struct Differences {
  double a0, a1;  // A's gain of row 0 over row 1, against column 0 / column 1
  double b0, b1;  // B's gain of column 0 over column 1, against row 0 / row 1
};

Differences differences(const RestrictedGame2x2& rg) {
  const auto& a = rg.a_sub;
  const auto& b = rg.b_sub;
  const double det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double det_b = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  auto scale = [](const std::array<std::array<double, 2>, 2>& m) {
    double s = 0.0;
    for (const auto& r : m)
      for (double x : r) s = std::max(s, std::abs(x));
    return s * s;
  };
  if (std::abs(det_a) <= 1e-12 * scale(a) || std::abs(det_b) <= 1e-12 * scale(b))
    throw ClassificationError("non-generic restricted game: singular payoff block");
  Differences d{a[0][0] - a[1][0], a[0][1] - a[1][1], b[0][0] - b[0][1], b[1][0] - b[1][1]};
  if (d.a0 == 0.0 || d.a1 == 0.0 || d.b0 == 0.0 || d.b1 == 0.0)
    throw ClassificationError("non-generic restricted game: a payoff difference vanishes");
  return d;
}

}  // namespace

Codim2Case classify_codim2(const RestrictedGame2x2& rg) {
  const Differences d = differences(rg);
  const bool interior = (d.a0 > 0) != (d.a1 > 0) && (d.b0 > 0) != (d.b1 > 0);
  if (!interior) return Codim2Case::Crossing;
  // A matches column 0 with row 0 iff a0 > 0; B then wants to leave column 0 iff b0 < 0.
  return (d.a0 > 0) != (d.b0 > 0) ? Codim2Case::SpiralStable : Codim2Case::Saddle;
}

std::pair<int, int> crossing_target(const RestrictedGame2x2& rg) {
  const Differences d = differences(rg);
  if ((d.a0 > 0) == (d.a1 > 0)) {
    const int row = d.a0 > 0 ? 0 : 1;
    const double gain = row == 0 ? d.b0 : d.b1;
    return {row, gain > 0 ? 0 : 1};
  }
  if ((d.b0 > 0) == (d.b1 > 0)) {
    const int col = d.b0 > 0 ? 0 : 1;
    const double gain = col == 0 ? d.a0 : d.a1;
    return {gain > 0 ? 0 : 1, col};
  }
  throw ClassificationError("restricted game has an interior equilibrium; no crossing target");
}

}  // namespace fpdyn
