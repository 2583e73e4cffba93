#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fpdyn/game.hpp"
#include "fpdyn/geometry.hpp"

namespace fpdyn {

enum class TimeScale { S, Rho };
enum class Codim2Policy { Abort, FollowJ, Perturb };

struct SimConfig {
  double tol_tie = kTieTol;
  std::size_t max_events = 1000;
  double max_time = std::numeric_limits<double>::infinity();
  TimeScale time_scale = TimeScale::S;
  // Spiral corners are followed along J under FollowJ; Crossing corners are
  // always passed through; Saddle corners stop the run unless Perturb.
  Codim2Policy codim2_policy = Codim2Policy::FollowJ;
  double perturb_eps = 1e-7;
  double equilibrium_radius = 1e-7;  // utility max-norm
  double simultaneity = 1e-10;       // in s-time

  void validate() const;
};

// What one player plays during a segment: a pure strategy, or a mixture on a
// tied pair (the continuous extension along Z*).
struct Play {
  int pure = -1;
  TiePair pair;
  double weight = 1.0;  // probability of pair.first when mixed

  static Play pure_strategy(int i);
  static Play mixture(TiePair p, double w);
  bool mixed() const { return pure < 0; }
  Vec distribution(std::size_t n) const;
  bool operator==(const Play&) const = default;
};

enum class EventKind { SingleIndifference, Codim2Hit, EquilibriumReached, DiscontinuityHit, Truncated };

std::string to_string(EventKind k);

struct Event {
  EventKind kind = EventKind::Truncated;
  Player player = Player::A;  // SingleIndifference
  TiePair pair;               // SingleIndifference
  std::optional<JLeg> leg;    // Codim2Hit
  std::optional<Codim2Case> codim2;
  std::string note;
};

std::string describe(const Event& e);

struct Segment {
  StateV start;
  StateV end;
  Play play_a;    // moves vB toward the matching mixture of B's rows
  Play play_b;    // moves vA toward the matching mixture of A's columns
  Vec target_a;   // limit of vA
  Vec target_b;   // limit of vB
  double duration_s = 0.0;
  Event end_event;

  std::optional<RegionLabel> region() const;
  std::optional<JLeg> leg() const;  // set when both plays are mixtures
};

struct Trajectory {
  StateP initial;
  std::vector<Segment> segments;
  Event stop;  // why the run ended
};

struct Tie {
  Player player;
  int leader;   // strategy currently played (or a member of the played pair)
  int catcher;  // strategy that reaches it
  double s;
};

struct NextEvent {
  double s = 1.0;
  std::vector<Tie> ties;  // all ties within the simultaneity window of s
  bool truncated = true;  // no tie before the targets are reached
};

// Target of vA for B's play, and of vB for A's play.
Vec target_for_a(const BimatrixGame& game, const Play& play_b);
Vec target_for_b(const BimatrixGame& game, const Play& play_a);

NextEvent time_to_next_event(const StateV& state, const Play& play_a, const Play& play_b,
                             const Vec& target_a, const Vec& target_b, double tol = kTieTol,
                             double simultaneity = 1e-10);
// Pure-strategy form: vA heads for column A_j, vB for row B_i.
NextEvent time_to_next_event(const BimatrixGame& game, const StateV& state, int target_a_col,
                             int target_b_row, double tol = kTieTol, double simultaneity = 1e-10);

StateV advance(const StateV& state, const Vec& target_a, const Vec& target_b, double s);

double s_to_rho(double s);  // s == 1 gives +infinity
double rho_to_s(double rho);

StateP p_from_v(const BimatrixGame& game, const StateV& state);
StateV v_from_p(const BimatrixGame& game, const StateP& state);

// Mixtures on (pair_a, pair_b) that keep both pairs tied, if they exist in [0,1].
std::optional<std::pair<Play, Play>> continuation_plays(const BimatrixGame& game, TiePair pair_a,
                                                         TiePair pair_b);

Trajectory simulate(const BimatrixGame& game, const StateP& init, const SimConfig& config = {});
Trajectory simulate_from(const BimatrixGame& game, const StateV& init, const SimConfig& config = {});

// One leg of the continuous extension on J for the Shapley family.
Segment j_flow_step(double beta, const StateV& state, double tol = kTieTol);

struct ItineraryEntry {
  std::optional<RegionLabel> region;
  std::optional<JLeg> leg;
  double duration_s = 0.0;
  double duration_rho = 0.0;
};

std::vector<ItineraryEntry> itinerary(const Trajectory& traj);

// Utility max-norm distance of the state from the equilibrium utilities.
double distance_to_equilibrium(const BimatrixGame& game, const StateV& state);

}  // namespace fpdyn
