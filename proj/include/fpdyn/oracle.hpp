#pragma once

#include <optional>
#include <string>

#include "fpdyn/geometry.hpp"

namespace fpdyn {

// Brute-force classification of a 2x2 game by simulating its best-response
// flow dx/drho = BR(y) - x, dy/drho = BR(x) - y exactly from a grid of starts.
struct OracleSettings {
  int grid = 10;
  double horizon = 50.0;  // rho-time
  std::size_t max_events = 100000;
};

struct OracleResult {
  std::optional<Codim2Case> outcome;  // empty when the runs fit no pattern
  int corners_reached = 0;            // distinct corners hit by the runs
  int halved = 0;                     // grid runs that halved their distance to the equilibrium
  int runs = 0;                       // grid runs
  bool has_interior_equilibrium = false;
  double x_star = 0.0, y_star = 0.0;  // row / column mixing weights of that equilibrium
};

OracleResult oracle_classify(const RestrictedGame2x2& rg, const OracleSettings& settings = {});

}  // namespace fpdyn
