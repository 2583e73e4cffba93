#pragma once

#include <string>
#include <vector>

#include "fpdyn/flow.hpp"
#include "fpdyn/orbits.hpp"
#include "fpdyn/return_map.hpp"
#include "fpdyn/transitions.hpp"

namespace fpdyn {

// 12 significant digits
std::string fmt(double x);

// {"family":"shapley","beta":x} or {"A":[[..]],"B":[[..]]}
BimatrixGame parse_game_spec(const std::string& json_text);

std::string event_label(const Event& e);  // CSV-safe, no commas

inline constexpr const char* kTrajectoryHeader =
    "event_index,s_cum,rho_cum,regionA,regionB,vA1,vA2,vA3,vB1,vB2,vB3,pA1,pA2,pA3,pB1,pB2,pB3,event_kind";
inline constexpr const char* kScanHeader =
    "beta,orbit_kind,exists,n1,n2,n3,m1,m2,m3,t1,t2,diameter,eig1_re,eig1_im,eig2_re,eig2_im,eig3_re,eig3_im,"
    "classification";

std::string trajectory_csv(const BimatrixGame& game, const Trajectory& traj);
std::string trajectory_json(const BimatrixGame& game, const Trajectory& traj);
std::string itinerary_json(const std::vector<ItineraryEntry>& it);
std::string diagram_json(const TransitionDiagram& d);
std::string attraction_json(const AttractionReport& r);

struct ScanRow {
  double beta = 0.0;
  std::string kind = "none";
  bool exists = false;
  Vec n, m;
  double t1 = 0.0, t2 = 0.0, diameter = 0.0;
  std::array<std::complex<double>, 3> eigenvalues{};
  std::string classification = "none";
};

ScanRow scan_point(double beta);
std::string scan_csv_row(const ScanRow& r);

}  // namespace fpdyn
