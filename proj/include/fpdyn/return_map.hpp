#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fpdyn/flow.hpp"
#include "fpdyn/sampling.hpp"

namespace fpdyn {

// z -> L(z) / f(z) with L, f affine, stored as a homogeneous (d+1)x(d+1) matrix
// normalized so that the bottom-right entry is 1 unless it is (numerically) zero.
class ProjectiveMap {
 public:
  explicit ProjectiveMap(Matrix h);
  static ProjectiveMap identity(std::size_t d);

  std::size_t dim() const { return h_.rows() - 1; }
  const Matrix& homogeneous() const { return h_; }
  double denominator(const Vec& z) const;  // f(z)
  Vec apply(const Vec& z) const;

 private:
  Matrix h_;
};

ProjectiveMap compose(const ProjectiveMap& t2, const ProjectiveMap& t1);  // t2 after t1

// Exit face of region k of the beta <= 0 cycle (1,2),(2,2),(2,3),(3,3),(3,1),(1,1)
// into region k+1; index 0..5.
struct SectionId {
  int index = 0;
  Player switching = Player::A;  // player whose best response changes
  TiePair pair;                  // its tied strategies
  int from = 0;                  // strategy it leaves
  int to = 1;                    // strategy it adopts
  int stay = 1;                  // the other player's strict strategy
  bool operator==(const SectionId&) const = default;
};

SectionId cycle_section(int index);
std::string to_string(const SectionId& s);  // "S1".."S6"
const std::array<RegionLabel, 6>& shapley_cycle();

// (tied value of the switching player, first two utilities of the other player)
Vec section_coords(const SectionId& s, const StateV& v);
StateV section_state(const SectionId& s, const Vec& z, double beta);
StateV sample_section(const BimatrixGame& game, const SectionId& s, Rng& rng);
StateV hit_map(const BimatrixGame& game, const SectionId& from, const SectionId& to, const StateV& v);

struct ProjectiveFit {
  ProjectiveMap map = ProjectiveMap::identity(3);
  double residual = 0.0;  // max-norm error on 20 held-out samples
  int attempts = 0;
};

ProjectiveFit projective_from_samples(const BimatrixGame& game, const SectionId& from, const SectionId& to,
                                      Rng& rng);

struct FirstReturn {
  ProjectiveMap map = ProjectiveMap::identity(3);  // S1 -> S1
  std::vector<ProjectiveMap> pieces;               // S1 -> S2, ..., S6 -> S1
  double residual = 0.0;                           // worst piece residual
  Vec fixed_point;                                 // section coordinates on S1
  StateV fixed_state;
  Vec e_coords;                                    // E in section coordinates
};

FirstReturn first_return(double beta, Rng& rng);

struct AttractionOutlier {
  std::size_t index = 0;
  std::string reason;
  double distance = 0.0;
};

struct AttractionReport {
  double beta = 0.0;
  std::size_t n_starts = 0;
  std::size_t horizon = 0;
  FirstReturn first;
  double converged_fraction = 0.0;
  double worst_distance = 0.0;
  std::vector<AttractionOutlier> outliers;
};

AttractionReport attraction_check(double beta, std::size_t n_starts, std::size_t horizon, std::uint64_t seed,
                                  double radius = 1e-5);

}  // namespace fpdyn
