#include "fpdyn/flow.hpp"

#include <algorithm>
#include <cmath>

#include "fpdyn/errors.hpp"

namespace fpdyn {

void SimConfig::validate() const {
  if (!(tol_tie > 0)) throw ParameterError("tol_tie must be positive");
  if (!(equilibrium_radius >= 0)) throw ParameterError("equilibrium_radius must be non-negative");
  if (!(simultaneity >= 0)) throw ParameterError("simultaneity must be non-negative");
  if (!(max_time > 0)) throw ParameterError("max_time must be positive");
  if (codim2_policy == Codim2Policy::Perturb && !(perturb_eps > tol_tie))
    throw ParameterError("perturb epsilon must exceed tol_tie");
}

Play Play::pure_strategy(int i) {
  Play p;
  p.pure = i;
  return p;
}

Play Play::mixture(TiePair pr, double w) {
  Play p;
  p.pair = pr;
  p.weight = w;
  return p;
}

Vec Play::distribution(std::size_t n) const {
  Vec d(n, 0.0);
  if (!mixed()) {
    d.at(static_cast<std::size_t>(pure)) = 1.0;
  } else {
    d.at(static_cast<std::size_t>(pair.first)) = weight;
    d.at(static_cast<std::size_t>(pair.second)) = 1.0 - weight;
  }
  return d;
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::SingleIndifference: return "SingleIndifference";
    case EventKind::Codim2Hit: return "Codim2Hit";
    case EventKind::EquilibriumReached: return "EquilibriumReached";
    case EventKind::DiscontinuityHit: return "DiscontinuityHit";
    case EventKind::Truncated: return "Truncated";
  }
  return "?";
}

std::string describe(const Event& e) {
  std::string s = to_string(e.kind);
  if (e.kind == EventKind::SingleIndifference) {
    s += std::string("(") + player_name(e.player) + to_string(e.pair) + ")";
  } else if (e.kind == EventKind::Codim2Hit) {
    s += "(";
    s += e.leg ? to_string(*e.leg) : std::string("-");
    if (e.codim2) s += ";" + to_string(*e.codim2);
    s += ")";
  }
  if (!e.note.empty()) s += " " + e.note;
  return s;
}

std::optional<RegionLabel> Segment::region() const {
  if (play_a.mixed() || play_b.mixed()) return std::nullopt;
  return RegionLabel{play_a.pure, play_b.pure};
}

std::optional<JLeg> Segment::leg() const {
  if (!play_a.mixed() || !play_b.mixed()) return std::nullopt;
  if (auto l = leg_for_pairs(play_a.pair, play_b.pair)) return l;
  return JLeg{LegFamily::J, 0, play_a.pair, play_b.pair};
}

Vec target_for_a(const BimatrixGame& game, const Play& play_b) {
  return game.a() * play_b.distribution(game.n());
}

Vec target_for_b(const BimatrixGame& game, const Play& play_a) {
  return row_times(play_a.distribution(game.n()), game.b());
}

namespace {

void scan_player(Player player, const Vec& v, const Vec& t, const Play& play, double tol,
                 std::vector<Tie>& out) {
  const int n = static_cast<int>(v.size());
  const int k = play.mixed() ? play.pair.first : play.pure;
  if (k < 0 || k >= n) throw ParameterError("played strategy out of range");
  const double top = *std::max_element(v.begin(), v.end());
  if (v[static_cast<std::size_t>(k)] < top - tol)
    throw ParameterError(std::string("played strategy of player ") + player_name(player) +
                         " is not a best response");
  for (int c = 0; c < n; ++c) {
    if (c == k || (play.mixed() && play.pair.contains(c))) continue;
    const double d0 = v[static_cast<std::size_t>(k)] - v[static_cast<std::size_t>(c)];
    const double d1 = t[static_cast<std::size_t>(k)] - t[static_cast<std::size_t>(c)];
    if (d1 >= 0.0) continue;
    if (d0 <= 0.0)
      throw ParameterError(std::string("state already tied: strategy ") + std::to_string(c + 1) +
                           " of player " + player_name(player) + " overtakes at once");
    out.push_back({player, k, c, d0 / (d0 - d1)});
  }
}

}  // namespace

NextEvent time_to_next_event(const StateV& state, const Play& play_a, const Play& play_b,
                             const Vec& target_a, const Vec& target_b, double tol,
                             double simultaneity) {
  std::vector<Tie> all;
  scan_player(Player::A, state.vA, target_a, play_a, tol, all);
  scan_player(Player::B, state.vB, target_b, play_b, tol, all);
  NextEvent next;
  if (all.empty()) return next;
  std::sort(all.begin(), all.end(), [](const Tie& x, const Tie& y) { return x.s < y.s; });
  next.s = all.front().s;
  next.truncated = false;
  for (const auto& t : all)
    if (t.s <= next.s + simultaneity) next.ties.push_back(t);
  return next;
}

NextEvent time_to_next_event(const BimatrixGame& game, const StateV& state, int target_a_col,
                             int target_b_row, double tol, double simultaneity) {
  const Play pa = Play::pure_strategy(target_b_row);
  const Play pb = Play::pure_strategy(target_a_col);
  return time_to_next_event(state, pa, pb, target_for_a(game, pb), target_for_b(game, pa), tol,
                            simultaneity);
}

StateV advance(const StateV& state, const Vec& target_a, const Vec& target_b, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("advance needs 0 <= s <= 1");
  return {lerp(state.vA, target_a, s), lerp(state.vB, target_b, s)};
}

double s_to_rho(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("s-time must lie in [0, 1]");
  if (s == 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-s);
}

double rho_to_s(double rho) {
  if (!(rho >= 0.0)) throw ParameterError("rho-time must be non-negative");
  return -std::expm1(-rho);
}

StateP p_from_v(const BimatrixGame& game, const StateV& state) {
  if (state.vA.size() != game.n() || state.vB.size() != game.n())
    throw StructuralError("state dimension does not match the game");
  const Vec ones(game.n(), 1.0);
  Vec pb = game.a_inverse() * (state.vA + game.a_shift() * ones);
  Vec pa = row_times(state.vB + game.b_shift() * ones, game.b_inverse());
  if (game.a_shift() != 0.0 && max_abs_diff(game.a() * pb, state.vA) > 1e-8)
    throw DomainError("utilities are not the image of a simplex point", pb);
  if (game.b_shift() != 0.0 && max_abs_diff(row_times(pa, game.b()), state.vB) > 1e-8)
    throw DomainError("utilities are not the image of a simplex point", pa);
  for (Vec* p : {&pa, &pb}) {
    for (double c : *p)
      if (c < -1e-8) throw DomainError("utilities are not the image of a simplex point", *p);
    if (std::abs(sum(*p) - 1.0) > 1e-8) throw DomainError("utilities are not the image of a simplex point", *p);
    double s = 0.0;
    for (double& c : *p) {
      c = std::max(c, 0.0);
      s += c;
    }
    for (double& c : *p) c /= s;
  }
  return {SimplexPoint(pa), SimplexPoint(pb)};
}

StateV v_from_p(const BimatrixGame& game, const StateP& state) { return utilities(game, state); }

std::optional<std::pair<Play, Play>> continuation_plays(const BimatrixGame& game, TiePair pair_a,
                                                         TiePair pair_b) {
  const auto& a = game.a();
  const auto& b = game.b();
  const auto r1 = static_cast<std::size_t>(pair_a.first), r2 = static_cast<std::size_t>(pair_a.second);
  const auto c1 = static_cast<std::size_t>(pair_b.first), c2 = static_cast<std::size_t>(pair_b.second);
  // A's weight on r1 keeps B's columns c1, c2 level.
  const double db0 = b(r1, c1) - b(r1, c2);
  const double db1 = b(r2, c1) - b(r2, c2);
  // B's weight on c1 keeps A's rows r1, r2 level.
  const double da0 = a(r1, c1) - a(r2, c1);
  const double da1 = a(r1, c2) - a(r2, c2);
  if (db1 == db0 || da1 == da0) return std::nullopt;
  double lambda = db1 / (db1 - db0);
  double mu = da1 / (da1 - da0);
  constexpr double slack = 1e-12;
  if (lambda < -slack || lambda > 1 + slack || mu < -slack || mu > 1 + slack) return std::nullopt;
  lambda = std::clamp(lambda, 0.0, 1.0);
  mu = std::clamp(mu, 0.0, 1.0);
  return std::make_pair(Play::mixture(pair_a, lambda), Play::mixture(pair_b, mu));
}

double distance_to_equilibrium(const BimatrixGame& game, const StateV& state) {
  const StateV e = utilities(game, interior_equilibrium(game));
  return std::max(max_abs_diff(state.vA, e.vA), max_abs_diff(state.vB, e.vB));
}

namespace {

// Tied player moves to the tied strategy with the largest target component.
int exit_strategy(Player player, const BestResponseSet& br, const Vec& target) {
  int best = br.indices.front();
  for (int i : br.indices)
    if (target[static_cast<std::size_t>(i)] > target[static_cast<std::size_t>(best)]) best = i;
  for (int i : br.indices) {
    if (i == best) continue;
    if (target[static_cast<std::size_t>(i)] == target[static_cast<std::size_t>(best)])
      throw AmbiguityError(std::string("non-transversal tie on the line Z^") + player_name(player) + "_" +
                           std::to_string(std::min(i, best) + 1) + std::to_string(std::max(i, best) + 1) +
                           ": equal payoffs against the opponent's strategy");
  }
  return best;
}

// At a point where `centre` ties all strategies and the other player ties a
// pair, choose the unique pair for the centre player that continues along Z*.
std::optional<std::pair<Play, Play>> junction_plays(const BimatrixGame& game, Player centre,
                                                    TiePair other_pair) {
  std::vector<std::pair<Play, Play>> found;
  const int n = static_cast<int>(game.n());
  if (n != 3) return std::nullopt;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const TiePair q(i, j);
      const auto plays = centre == Player::A ? continuation_plays(game, q, other_pair)
                                             : continuation_plays(game, other_pair, q);
      if (!plays) continue;
      const Vec t = centre == Player::A ? target_for_a(game, plays->second) : target_for_b(game, plays->first);
      const double tq = t[static_cast<std::size_t>(q.first)];
      const double tr = t[static_cast<std::size_t>(q.third())];
      if (tq > tr) found.push_back(*plays);
    }
  if (found.size() != 1) return std::nullopt;
  return found.front();
}

void snap_pair(Vec& v, int i, int j) {
  const double m = 0.5 * (v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(j)]);
  v[static_cast<std::size_t>(i)] = m;
  v[static_cast<std::size_t>(j)] = m;
}

void snap_all(Vec& v) {
  const double m = sum(v) / static_cast<double>(v.size());
  for (double& x : v) x = m;
}

// Make the new ties exact so that the next step sees them as ties.
void snap(StateV& v, const Play& pa, const Play& pb, const std::vector<Tie>& ties) {
  if (pa.mixed()) snap_pair(v.vA, pa.pair.first, pa.pair.second);
  if (pb.mixed()) snap_pair(v.vB, pb.pair.first, pb.pair.second);
  for (const auto& t : ties) {
    Vec& x = t.player == Player::A ? v.vA : v.vB;
    const Play& p = t.player == Player::A ? pa : pb;
    if (p.mixed())
      snap_all(x);
    else
      snap_pair(x, t.leader, t.catcher);
  }
}

Event boundary_event(const BimatrixGame& game, const StateV& v, double tol) {
  const auto ba = best_response_set(v.vA, tol, Player::A);
  const auto bb = best_response_set(v.vB, tol, Player::B);
  Event e;
  if (ba.strict() && bb.strict()) {
    e.kind = EventKind::Truncated;
    return e;
  }
  if (ba.strict() != bb.strict()) {
    const auto& br = ba.strict() ? bb : ba;
    if (br.indices.size() == 2) {
      e.kind = EventKind::SingleIndifference;
      e.player = br.player;
      e.pair = TiePair(br.indices[0], br.indices[1]);
      return e;
    }
    e.kind = EventKind::Codim2Hit;
    e.note = std::string("centre of ") + player_name(br.player);
    return e;
  }
  e.kind = EventKind::Codim2Hit;
  if (ba.indices.size() == 2 && bb.indices.size() == 2) {
    const TiePair pa(ba.indices[0], ba.indices[1]), pb(bb.indices[0], bb.indices[1]);
    if (game.n() == 3) e.leg = leg_for_pairs(pa, pb);
    try {
      e.codim2 = classify_codim2(restricted_game(game, pa, pb));
    } catch (const ClassificationError&) {
    }
  } else if (ba.indices.size() == game.n() && bb.indices.size() == game.n()) {
    e.note = "at E";
  } else {
    e.note = "codimension-three junction";
  }
  return e;
}

class Engine {
 public:
  Engine(const BimatrixGame& game, const SimConfig& cfg) : game_(game), cfg_(cfg) {
    try {
      e_ = utilities(game_, interior_equilibrium(game_));
    } catch (const DomainError&) {
    }
  }

  Trajectory run(const StateV& init, StateP initial_p) {
    Trajectory traj{std::move(initial_p), {}, {}};
    StateV v = init;
    double t_s = 0.0, t_rho = 0.0;
    while (true) {
      if (traj.segments.size() >= cfg_.max_events) {
        traj.stop = {EventKind::Truncated, Player::A, {}, {}, {}, "max_events"};
        return traj;
      }
      const Segment* prev = traj.segments.empty() ? nullptr : &traj.segments.back();
      Decision d = resolve(v, prev);
      if (d.stop) {
        traj.stop = d.event;
        return traj;
      }
      Segment seg;
      seg.start = v;
      seg.play_a = d.play_a;
      seg.play_b = d.play_b;
      seg.target_a = target_for_a(game_, d.play_b);
      seg.target_b = target_for_b(game_, d.play_a);
      if (d.perturb) {
        seg.duration_s = cfg_.perturb_eps;
        seg.end = advance(v, seg.target_a, seg.target_b, seg.duration_s);
        seg.end_event = boundary_event(game_, seg.end, cfg_.tol_tie);
        seg.end_event.note = "perturbed past a codimension-two point";
        perturbed_ = true;
      } else {
        const NextEvent next = time_to_next_event(v, d.play_a, d.play_b, seg.target_a, seg.target_b,
                                                  cfg_.tol_tie, cfg_.simultaneity);
        seg.duration_s = next.s;
        seg.end = advance(v, seg.target_a, seg.target_b, next.s);
        snap(seg.end, d.play_a, d.play_b, next.ties);
        if (next.truncated) {
          seg.end_event = {EventKind::Truncated, Player::A, {}, {}, {}, "no finite tie time"};
        } else {
          seg.end_event = boundary_event(game_, seg.end, cfg_.tol_tie);
        }
        perturbed_ = false;
      }
      // time budget
      const double dt = cfg_.time_scale == TimeScale::S ? seg.duration_s : s_to_rho(seg.duration_s);
      const double used = cfg_.time_scale == TimeScale::S ? t_s : t_rho;
      if (used + dt > cfg_.max_time) {
        const double left = cfg_.max_time - used;
        seg.duration_s = cfg_.time_scale == TimeScale::S ? left : rho_to_s(left);
        seg.end = advance(v, seg.target_a, seg.target_b, seg.duration_s);
        seg.end_event = {EventKind::Truncated, Player::A, {}, {}, {}, "max_time"};
        traj.segments.push_back(seg);
        traj.stop = seg.end_event;
        return traj;
      }
      t_s += seg.duration_s;
      t_rho += s_to_rho(seg.duration_s);
      v = seg.end;
      const bool stop = seg.end_event.kind == EventKind::Truncated;
      traj.segments.push_back(std::move(seg));
      if (stop) {
        traj.stop = traj.segments.back().end_event;
        return traj;
      }
    }
  }

 private:
  struct Decision {
    bool stop = false;
    Event event;
    Play play_a, play_b;
    bool perturb = false;
  };

  static Decision halt(EventKind k, std::string note) {
    Decision d;
    d.stop = true;
    d.event.kind = k;
    d.event.note = std::move(note);
    return d;
  }

  static Decision go(Play a, Play b) {
    Decision d;
    d.play_a = a;
    d.play_b = b;
    return d;
  }

  Decision perturb_or_halt(const Segment* prev, const std::string& what) {
    if (cfg_.codim2_policy != Codim2Policy::Perturb) return halt(EventKind::DiscontinuityHit, what);
    if (prev == nullptr || perturbed_)
      return halt(EventKind::DiscontinuityHit, what + "; perturbation did not leave the corner");
    Decision d = go(prev->play_a, prev->play_b);
    d.perturb = true;
    return d;
  }

  Decision resolve(const StateV& v, const Segment* prev) {
    if (!e_.vA.empty() &&
        std::max(max_abs_diff(v.vA, e_.vA), max_abs_diff(v.vB, e_.vB)) <= cfg_.equilibrium_radius)
      return halt(EventKind::EquilibriumReached, "within equilibrium_radius of E");
    const auto ba = best_response_set(v.vA, cfg_.tol_tie, Player::A);
    const auto bb = best_response_set(v.vB, cfg_.tol_tie, Player::B);
    const std::size_t n = game_.n();
    if (ba.indices.size() == n && bb.indices.size() == n)
      return halt(EventKind::EquilibriumReached, "all strategies tied for both players");
    if (ba.strict() && bb.strict())
      return go(Play::pure_strategy(ba.indices[0]), Play::pure_strategy(bb.indices[0]));
    if (bb.strict()) {
      const Play pb = Play::pure_strategy(bb.indices[0]);
      const int i = exit_strategy(Player::A, ba, target_for_a(game_, pb));
      return go(Play::pure_strategy(i), pb);
    }
    if (ba.strict()) {
      const Play pa = Play::pure_strategy(ba.indices[0]);
      const int j = exit_strategy(Player::B, bb, target_for_b(game_, pa));
      return go(pa, Play::pure_strategy(j));
    }
    if (ba.indices.size() == 2 && bb.indices.size() == 2) {
      const TiePair pa(ba.indices[0], ba.indices[1]), pb(bb.indices[0], bb.indices[1]);
      const RestrictedGame2x2 rg = restricted_game(game_, pa, pb);
      Codim2Case c;
      try {
        c = classify_codim2(rg);
      } catch (const ClassificationError&) {
        throw AmbiguityError("non-transversal codimension-two point Z^A_" + to_string(pa) + " x Z^B_" +
                             to_string(pb));
      }
      switch (c) {
        case Codim2Case::Crossing: {
          const auto [r, col] = crossing_target(rg);
          return go(Play::pure_strategy(r == 0 ? pa.first : pa.second),
                    Play::pure_strategy(col == 0 ? pb.first : pb.second));
        }
        case Codim2Case::SpiralStable:
          if (cfg_.codim2_policy == Codim2Policy::FollowJ) {
            if (auto plays = continuation_plays(game_, pa, pb)) return go(plays->first, plays->second);
            return halt(EventKind::DiscontinuityHit, "no continuation through the spiral corner");
          }
          return perturb_or_halt(prev, "spiral corner");
        case Codim2Case::Saddle:
          return perturb_or_halt(prev, "saddle corner: genuine non-uniqueness");
      }
    }
    // one player ties everything, the other a pair
    if (cfg_.codim2_policy == Codim2Policy::FollowJ) {
      const bool a_centre = ba.indices.size() == n;
      const auto& pair_br = a_centre ? bb : ba;
      if (pair_br.indices.size() == 2) {
        const TiePair q(pair_br.indices[0], pair_br.indices[1]);
        if (auto plays = junction_plays(game_, a_centre ? Player::A : Player::B, q))
          return go(plays->first, plays->second);
      }
      return halt(EventKind::DiscontinuityHit, "no unique continuation at a codimension-three point");
    }
    return perturb_or_halt(prev, "codimension-three point");
  }

  const BimatrixGame& game_;
  SimConfig cfg_;
  StateV e_;
  bool perturbed_ = false;
};

}  // namespace

Trajectory simulate_from(const BimatrixGame& game, const StateV& init, const SimConfig& config) {
  config.validate();
  StateP p = p_from_v(game, init);
  Engine eng(game, config);
  return eng.run(init, std::move(p));
}

Trajectory simulate(const BimatrixGame& game, const StateP& init, const SimConfig& config) {
  config.validate();
  Engine eng(game, config);
  return eng.run(utilities(game, init), init);
}

Segment j_flow_step(double beta, const StateV& state, double tol) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ParameterError("the flow on J is defined for beta in (0, 1]");
  const BimatrixGame game = make_shapley(beta);
  const auto ba = best_response_set(state.vA, tol, Player::A);
  const auto bb = best_response_set(state.vB, tol, Player::B);
  if (ba.indices.size() == 3 && bb.indices.size() == 3)
    throw AmbiguityError("genuine non-uniqueness of the flow at E");
  std::optional<std::pair<Play, Play>> plays;
  if (ba.indices.size() == 2 && bb.indices.size() == 2) {
    const TiePair pa(ba.indices[0], ba.indices[1]), pb(bb.indices[0], bb.indices[1]);
    const auto leg = leg_for_pairs(pa, pb);
    if (!leg || leg->family != LegFamily::J) throw ParameterError("state is not on a J leg");
    plays = continuation_plays(game, pa, pb);
  } else if (ba.indices.size() == 3 && bb.indices.size() == 2) {
    plays = junction_plays(game, Player::A, TiePair(bb.indices[0], bb.indices[1]));
  } else if (bb.indices.size() == 3 && ba.indices.size() == 2) {
    plays = junction_plays(game, Player::B, TiePair(ba.indices[0], ba.indices[1]));
  } else {
    throw ParameterError("state is not on J");
  }
  if (!plays) throw ParameterError("no continuation along J from this state");
  Segment seg;
  seg.start = state;
  seg.play_a = plays->first;
  seg.play_b = plays->second;
  seg.target_a = target_for_a(game, seg.play_b);
  seg.target_b = target_for_b(game, seg.play_a);
  const NextEvent next = time_to_next_event(state, seg.play_a, seg.play_b, seg.target_a, seg.target_b, tol);
  if (next.truncated) throw ParameterError("leg on J does not end");
  seg.duration_s = next.s;
  seg.end = advance(state, seg.target_a, seg.target_b, next.s);
  snap(seg.end, seg.play_a, seg.play_b, next.ties);
  seg.end_event = boundary_event(game, seg.end, tol);
  return seg;
}

std::vector<ItineraryEntry> itinerary(const Trajectory& traj) {
  std::vector<ItineraryEntry> out;
  out.reserve(traj.segments.size());
  for (const auto& s : traj.segments) {
    ItineraryEntry e;
    e.region = s.region();
    e.leg = s.leg();
    e.duration_s = s.duration_s;
    e.duration_rho = s_to_rho(s.duration_s);
    out.push_back(e);
  }
  return out;
}

}  // namespace fpdyn
