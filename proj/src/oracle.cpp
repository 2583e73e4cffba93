#include "fpdyn/oracle.hpp"

#include <cmath>
#include <algorithm>
#include <set>
#include <vector>

namespace fpdyn {

namespace {

struct Flow2x2 {
  // A's advantage of row 0 over row 1 as a function of y (weight on column 0),
  // B's advantage of column 0 over column 1 as a function of x (weight on row 0).
  double ga0, ga1;  // value at y = 0 and y = 1
  double gb0, gb1;  // value at x = 0 and x = 1

  double adv_a(double y) const { return ga0 + (ga1 - ga0) * y; }
  double adv_b(double x) const { return gb0 + (gb1 - gb0) * x; }
};

// Time for a coordinate moving from c toward target T to reach the level c_star.
double crossing_time(double c, double target, double c_star) {
  const double lo = std::min(c, target), hi = std::max(c, target);
  if (!(c_star > lo && c_star < hi)) return INFINITY;
  if (c == c_star) return INFINITY;
  return std::log((c - target) / (c_star - target));
}

struct RunEnd {
  double x, y;
};

RunEnd run(const Flow2x2& f, double x, double y, const OracleSettings& cfg, std::optional<double> xs,
           std::optional<double> ys) {
  double X = f.adv_a(y) > 0 ? 1.0 : 0.0;  // A's target for x
  double Y = f.adv_b(x) > 0 ? 1.0 : 0.0;  // B's target for y
  double rho = 0.0;
  for (std::size_t k = 0; k < cfg.max_events && rho < cfg.horizon; ++k) {
    // A switches when y crosses ys, B switches when x crosses xs
    const double ta = ys ? crossing_time(y, Y, *ys) : INFINITY;
    const double tb = xs ? crossing_time(x, X, *xs) : INFINITY;
    double t = std::min({ta, tb, cfg.horizon - rho});
    const double decay = std::exp(-t);
    x = X + (x - X) * decay;
    y = Y + (y - Y) * decay;
    rho += t;
    if (t == ta) {
      y = *ys;
      X = f.adv_a(Y) > 0 ? 1.0 : 0.0;
    }
    if (t == tb) {
      x = *xs;
      Y = f.adv_b(X) > 0 ? 1.0 : 0.0;
    }
    if (xs && ys && std::max(std::abs(x - *xs), std::abs(y - *ys)) < 1e-13) break;
  }
  return {x, y};
}

std::optional<double> zero_in_open_unit(double g0, double g1) {
  if (g0 == g1) return std::nullopt;
  const double z = g0 / (g0 - g1);
  if (z > 0.0 && z < 1.0) return z;
  return std::nullopt;
}

}  // namespace

OracleResult oracle_classify(const RestrictedGame2x2& rg, const OracleSettings& cfg) {
  const auto& a = rg.a_sub;
  const auto& b = rg.b_sub;
  Flow2x2 f{a[0][1] - a[1][1], a[0][0] - a[1][0], b[1][0] - b[1][1], b[0][0] - b[0][1]};
  const std::optional<double> ys = zero_in_open_unit(f.ga0, f.ga1);
  const std::optional<double> xs = zero_in_open_unit(f.gb0, f.gb1);

  OracleResult res;
  res.has_interior_equilibrium = xs && ys;
  if (res.has_interior_equilibrium) {
    res.x_star = *xs;
    res.y_star = *ys;
  }
  std::vector<std::pair<double, double>> starts;
  for (int i = 0; i < cfg.grid; ++i)
    for (int j = 0; j < cfg.grid; ++j)
      // offset grid keeps starts off the switching lines for generic games
      starts.push_back({(i + 0.5) / cfg.grid + 1e-7 * (j + 1), (j + 0.5) / cfg.grid + 1e-7 * (i + 1)});
  if (res.has_interior_equilibrium) {
    // symmetric probes around the equilibrium; the grid can miss one side of
    // a stable manifold when the equilibrium sits close to an edge
    const double d = 1e-3 * std::min({res.x_star, 1 - res.x_star, res.y_star, 1 - res.y_star});
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0}) starts.push_back({res.x_star + sx * d, res.y_star + sy * d});
  }
  std::set<std::pair<int, int>> corners;
  bool all_corner = true;
  const std::size_t grid_runs = static_cast<std::size_t>(cfg.grid * cfg.grid);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const auto [x0, y0] = starts[k];
    const RunEnd e = run(f, x0, y0, cfg, xs, ys);
    const int cx = static_cast<int>(std::lround(e.x)), cy = static_cast<int>(std::lround(e.y));
    if (std::abs(e.x - cx) < 1e-6 && std::abs(e.y - cy) < 1e-6)
      corners.insert({cx, cy});
    else
      all_corner = false;
    if (k >= grid_runs) continue;  // probes only report corners
    ++res.runs;
    if (res.has_interior_equilibrium) {
      const double d0 = std::max(std::abs(x0 - res.x_star), std::abs(y0 - res.y_star));
      const double d1 = std::max(std::abs(e.x - res.x_star), std::abs(e.y - res.y_star));
      if (d1 <= 0.5 * d0) ++res.halved;
    }
  }
  res.corners_reached = static_cast<int>(corners.size());
  if (all_corner && corners.size() == 1)
    res.outcome = Codim2Case::Crossing;
  else if (res.has_interior_equilibrium && res.halved == res.runs)
    res.outcome = Codim2Case::SpiralStable;
  else if (res.has_interior_equilibrium && corners.size() >= 2)
    res.outcome = Codim2Case::Saddle;
  return res;
}

}  // namespace fpdyn
