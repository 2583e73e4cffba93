#include "fpdyn/invariants.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <cmath>
#include <future>
#include <map>
#include <sstream>

#include "fpdyn/errors.hpp"
#include "fpdyn/io.hpp"
#include "fpdyn/oracle.hpp"
#include "fpdyn/orbits.hpp"
#include "fpdyn/return_map.hpp"
#include "fpdyn/sampling.hpp"
#include "fpdyn/transitions.hpp"

namespace fpdyn {

namespace {

const std::vector<double> kBetaGrid{-0.9, -0.5, 0.0, 0.3, 0.6, 0.8, 0.95};

std::string num(double x) { return fmt(x); }

CheckOutcome verdict(bool ok, const std::string& detail) { return {ok, detail}; }

// ---------------------------------------------------------------- game_core

CheckOutcome utility_sums() {
  Rng rng(101);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double beta = -0.999 + 1.999 * (k + 0.5) / 200.0;
    const BimatrixGame g = make_shapley(beta);
    const StateV v = utilities(g, sample_state(rng, 3));
    worst = std::max({worst, std::abs(sum(v.vA) - (1 + beta)), std::abs(sum(v.vB) - (1 - beta))});
  }
  return verdict(worst <= 1e-10, "max sum error " + num(worst));
}

CheckOutcome shapley_entries() {
  for (double beta : {-0.7, 0.0, 0.5, 1.0}) {
    const BimatrixGame g = make_shapley(beta);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double a = i == j ? 1.0 : (j + 1) % 3 == i ? beta : 0.0;
        const double b = i == j ? -beta : (i + 1) % 3 == j ? 1.0 : 0.0;
        if (g.a()(i, j) != a || g.b()(i, j) != b) return verdict(false, "entry mismatch at beta " + num(beta));
      }
  }
  return verdict(true, "A and B entries exact at four beta values");
}

CheckOutcome argmax_invariance() {
  Rng rng(102);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 10.0);
  for (int k = 0; k < 1000; ++k) {
    Vec v{u(rng), u(rng), u(rng)};
    if (k % 10 == 0) v[1] = v[0];
    const auto base = best_response_set(v);
    const double c = u(rng), s = pos(rng);
    Vec shifted = v, scaled = v;
    for (double& x : shifted) x += c;
    for (double& x : scaled) x *= s;
    if (best_response_set(shifted).indices != base.indices || best_response_set(scaled).indices != base.indices)
      return verdict(false, "argmax changed under shift/scale");
    if ((base.margin == 0.0) != (base.indices.size() >= 2)) return verdict(false, "margin/tie mismatch");
  }
  return verdict(true, "1000 vectors");
}

CheckOutcome shapley_equilibrium() {
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double beta = -0.995 + 1.995 * k / 199.0;
    const StateP e = interior_equilibrium(make_shapley(beta));
    for (double x : e.pA.components()) worst = std::max(worst, std::abs(x - 1.0 / 3));
    for (double x : e.pB.components()) worst = std::max(worst, std::abs(x - 1.0 / 3));
  }
  return verdict(worst <= 1e-12, "max deviation from barycenter " + num(worst));
}

CheckOutcome zero_sum_minimum() {
  const double s = golden_mean();
  const double at = zero_sum_certificate(s);
  double best_other = INFINITY;
  for (int k = 0; k <= 2000; ++k) {
    const double beta = -0.999 + 1.999 * k / 2000.0;
    if (std::abs(beta - s) < 1e-4) continue;
    best_other = std::min(best_other, zero_sum_certificate(beta));
  }
  return verdict(at <= 1e-12 && best_other > at, "residual at sigma " + num(at) + ", elsewhere >= " + num(best_other));
}

CheckOutcome round_trip() {
  Rng rng(103);
  double worst = 0.0;
  for (double beta : kBetaGrid) {
    const BimatrixGame g = make_shapley(beta);
    for (int k = 0; k < 100; ++k) {
      const StateP p = sample_state(rng, 3);
      const StateV v = utilities(g, p);
      const StateV back = v_from_p(g, p_from_v(g, v));
      worst = std::max({worst, max_abs_diff(v.vA, back.vA), max_abs_diff(v.vB, back.vB)});
    }
  }
  return verdict(worst <= 1e-10, "max round-trip error " + num(worst));
}

// ---------------------------------------------------------- indifference geometry

std::vector<RestrictedGame2x2> random_restricted_games(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<RestrictedGame2x2> out;
  while (out.size() < n) {
    std::array<std::array<double, 2>, 2> a{}, b{};
    for (auto& r : a)
      for (double& x : r) x = u(rng);
    for (auto& r : b)
      for (double& x : r) x = u(rng);
    const double da = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    const double db = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    if (std::abs(da) < 1e-6 || std::abs(db) < 1e-6) continue;
    out.push_back(make_restricted(a, b));
  }
  return out;
}

CheckOutcome oracle_equivalence() {
  std::vector<RestrictedGame2x2> games;
  for (double beta : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
    const BimatrixGame g = make_shapley(beta);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = k + 1; l < 3; ++l) games.push_back(restricted_game(g, TiePair(i, j), TiePair(k, l)));
  }
  for (auto& rg : random_restricted_games(500, 104)) games.push_back(rg);
  const std::size_t chunks = 8;
  std::vector<std::future<std::vector<std::size_t>>> parts;
  for (std::size_t c = 0; c < chunks; ++c)
    parts.push_back(std::async(std::launch::async, [&games, c, chunks] {
      std::vector<std::size_t> bad;
      for (std::size_t i = c; i < games.size(); i += chunks) {
        const OracleResult o = oracle_classify(games[i]);
        if (!o.outcome || *o.outcome != classify_codim2(games[i])) bad.push_back(i);
      }
      return bad;
    }));
  std::size_t mismatches = 0;
  std::string first;
  for (auto& f : parts) {
    const auto bad = f.get();
    if (!bad.empty() && first.empty()) first = " first: game " + std::to_string(bad.front());
    mismatches += bad.size();
  }
  return verdict(mismatches == 0, std::to_string(games.size()) + " games, " + std::to_string(mismatches) +
                                      " disagreements" + first);
}

CheckOutcome leg_classes() {
  for (double beta : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9, 0.99}) {
    const BimatrixGame g = make_shapley(beta);
    // beta>0: J spirals, T crosses; beta<0: J crosses, T is a saddle
    const Codim2Case want_j = beta > 0 ? Codim2Case::SpiralStable : Codim2Case::Crossing;
    const Codim2Case want_t = beta > 0 ? Codim2Case::Crossing : Codim2Case::Saddle;
    for (const auto& l : j_legs()) {
      const Codim2Case c = classify_codim2(restricted_game(g, l.pair_a, l.pair_b));
      if (c != want_j) return verdict(false, to_string(l) + " at beta " + num(beta) + " is " + to_string(c));
    }
    for (const auto& l : t_legs()) {
      const Codim2Case c = classify_codim2(restricted_game(g, l.pair_a, l.pair_b));
      if (c != want_t) return verdict(false, to_string(l) + " at beta " + num(beta) + " is " + to_string(c));
    }
  }
  return verdict(true, "beta>0: J spiral, T crossing; beta<0: J crossing, T saddle");
}

CheckOutcome anchors() {
  const auto a0 = indifference_anchors(0.0);
  for (const auto& l : a0.loci) {
    int halves = 0, zeros = 0;
    for (double x : l.to) {
      if (std::abs(x - 0.5) < 1e-15) ++halves;
      if (x == 0.0) ++zeros;
    }
    if (halves != 2 || zeros != 1) return verdict(false, "beta=0 endpoint is not an edge midpoint");
  }
  // every locus point ties its player's pair
  for (double beta : {-0.5, 0.3, 0.9, 1.0}) {
    const BimatrixGame g = make_shapley(beta);
    for (const auto& l : indifference_anchors(beta).loci) {
      for (double t : {0.0, 0.37, 1.0}) {
        const Vec p = lerp(l.from, l.to, t);
        const Vec v = l.player == Player::A ? g.a() * p : row_times(p, g.b());
        const double gap = std::abs(v[static_cast<std::size_t>(l.pair.first)] - v[static_cast<std::size_t>(l.pair.second)]);
        const double third = v[static_cast<std::size_t>(l.pair.third())];
        if (gap > 1e-12 || third > v[static_cast<std::size_t>(l.pair.first)] + 1e-12)
          return verdict(false, "locus point is not on the indifference segment at beta " + num(beta));
      }
    }
    if ((beta > 0) != !indifference_anchors(beta).q_points.empty())
      return verdict(false, "Q points present only for beta>0");
  }
  return verdict(true, "midpoints at beta=0; loci tie exactly");
}

// ---------------------------------------------------------------- flow engine

struct RunStats {
  double sums = 0.0, chain = 0.0, interp = 0.0, tie = 0.0;
  bool monotone = true, label = true, start_tie_ok = true;
};

void inspect(const BimatrixGame& g, const Trajectory& tr, RunStats& st) {
  const double beta = g.beta().value_or(0.0);
  StateV prev = utilities(g, tr.initial);
  for (const auto& seg : tr.segments) {
    st.chain = std::max({st.chain, max_abs_diff(seg.start.vA, prev.vA), max_abs_diff(seg.start.vB, prev.vB)});
    prev = seg.end;
    st.sums = std::max({st.sums, std::abs(sum(seg.end.vA) - (1 + beta)), std::abs(sum(seg.end.vB) - (1 - beta))});
    if (!(seg.duration_s > 0.0)) st.monotone = false;
    // affine interpolation at s and s/2
    const double s = seg.duration_s;
    const StateV half = advance(seg.start, seg.target_a, seg.target_b, s / 2);
    const StateV full = advance(seg.start, seg.target_a, seg.target_b, s);
    st.interp = std::max({st.interp, max_abs_diff(full.vA, seg.end.vA), max_abs_diff(full.vB, seg.end.vB),
                          max_abs_diff(half.vA, lerp(seg.start.vA, seg.end.vA, 0.5)),
                          max_abs_diff(half.vB, lerp(seg.start.vB, seg.end.vB, 0.5))});
    if (seg.region()) {
      const auto r = region_of(half);
      if (!std::holds_alternative<RegionLabel>(r) || std::get<RegionLabel>(r) != *seg.region()) st.label = false;
    }
    const Event& e = seg.end_event;
    if (e.kind == EventKind::SingleIndifference) {
      const Vec& v = e.player == Player::A ? seg.end.vA : seg.end.vB;
      const Vec& v0 = e.player == Player::A ? seg.start.vA : seg.start.vB;
      const auto i = static_cast<std::size_t>(e.pair.first), j = static_cast<std::size_t>(e.pair.second);
      st.tie = std::max(st.tie, std::abs(v[i] - v[j]));
      if (!(std::abs(v0[i] - v0[j]) > kTieTol)) st.start_tie_ok = false;
    }
  }
}

CheckOutcome trajectory_properties() {
  Rng rng(105);
  RunStats st;
  std::size_t runs = 0;
  for (double beta : kBetaGrid) {
    const BimatrixGame g = make_shapley(beta);
    for (int k = 0; k < 30; ++k) {
      SimConfig cfg;
      cfg.max_events = 200;
      inspect(g, simulate(g, sample_state(rng, 3), cfg), st);
      ++runs;
    }
  }
  std::ostringstream d;
  d << runs << " runs; sums " << num(st.sums) << ", chain " << num(st.chain) << ", affine " << num(st.interp)
    << ", event tie " << num(st.tie);
  const bool ok = st.sums <= 1e-9 && st.chain == 0.0 && st.interp <= 1e-12 && st.tie < kTieTol && st.monotone &&
                  st.label && st.start_tie_ok;
  if (!st.monotone) d << "; non-positive segment duration";
  if (!st.label) d << "; region label changes inside a segment";
  if (!st.start_tie_ok) d << "; event pair already tied at segment start";
  return verdict(ok, d.str());
}

CheckOutcome no_ambiguity_positive_beta() {
  Rng rng(106);
  std::size_t bad = 0, runs = 0;
  std::string first;
  for (double beta : {0.1, 0.3, 0.6, 0.8, 0.95}) {
    const BimatrixGame g = make_shapley(beta);
    for (int k = 0; k < 200; ++k) {
      SimConfig cfg;
      cfg.max_events = 300;
      const StateP p = sample_state(rng, 3);
      ++runs;
      try {
        simulate(g, p, cfg);
      } catch (const AmbiguityError& e) {
        ++bad;
        if (first.empty()) first = e.what();
      }
    }
  }
  return verdict(bad == 0, std::to_string(runs) + " runs, " + std::to_string(bad) + " ambiguous" +
                               (first.empty() ? "" : ": " + first));
}

StateV j_state(double beta, double x) {
  const double a = (1 + beta - 2 * x) / 3, c = (1 + beta + x) / 3, b = (1 - beta) / 3;
  return {{a, c, c}, {b, b, b}};
}

CheckOutcome j_gap_recursion() {
  Rng rng(107);
  const double s = golden_mean();
  std::uniform_real_distribution<double> ub(s + 0.01, 1.0), ux(0.01, 0.3);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double beta = ub(rng), x = ux(rng);
    const StateV a = j_flow_step(beta, j_state(beta, x)).end;
    const StateV b = j_flow_step(beta, a).end;
    // two legs later B is again fully tied and vA has one low entry
    const double gap = *std::max_element(b.vA.begin(), b.vA.end()) - *std::min_element(b.vA.begin(), b.vA.end());
    worst = std::max(worst, std::abs(gap - j_map_F(beta, x)) + max_abs_diff(b.vB, Vec(3, (1 - beta) / 3)));
  }
  return verdict(worst <= 1e-10, "max |gap - F(X)| " + num(worst));
}

// -------------------------------------------------------------- orbit analysis

CheckOutcome cubic_signs() {
  for (int k = 0; k < 100; ++k) {
    const double b = -0.99 + 1.98 * (k + 0.5) / 100.0;
    const Cubic cw = clockwise_cubic(b), acw = anticlockwise_cubic(b);
    if (!(eval_cubic(cw, 0) < 0 && eval_cubic(cw, 1) > 0)) return verdict(false, "clockwise sign pattern at " + num(b));
    if (std::abs(eval_cubic(cw, 0) - (-1 - b)) > 1e-12 || std::abs(eval_cubic(cw, 1) - (b * b * b + b * b + b + 1)) > 1e-12)
      return verdict(false, "clockwise endpoint values at " + num(b));
    // the anticlockwise pattern is needed on (0,1); f(1) of the printed cubic is -1
    if (b > 0 && !(eval_cubic(acw, 0) < 0 && eval_cubic(acw, 1.0 / 3) > 0 && eval_cubic(acw, 1) < 0))
      return verdict(false, "anticlockwise sign pattern at " + num(b));
    if (std::abs(eval_cubic(acw, 0) + b * b) > 1e-12 || std::abs(eval_cubic(acw, 1) + 1) > 1e-12 ||
        std::abs(eval_cubic(acw, 1.0 / 3) - (2 * b * b * b / 9 + 1.0 / 9)) > 1e-12)
      return verdict(false, "anticlockwise endpoint values at " + num(b));
  }
  return verdict(true, "100 beta samples");
}

CheckOutcome orbit_closure() {
  const double s = golden_mean();
  double worst = 0.0;
  std::size_t n = 0;
  for (int k = 0; k < 12; ++k) {
    const double cb = -0.95 + (s - 0.01 + 0.95) * k / 11.0;
    const double ab = s + 0.01 + (1.0 - s - 0.01) * k / 11.0;
    for (const PeriodicOrbitSpec& o : {clockwise_orbit(cb), anticlockwise_orbit(ab)}) {
      worst = std::max(worst, o.closure_residual);
      ++n;
    }
  }
  return verdict(worst <= 1e-8, std::to_string(n) + " orbits, max closure residual " + num(worst));
}

CheckOutcome sigma_degeneracy() {
  const double s = golden_mean();
  const std::vector<double> deltas{1e-3, 5e-4, 2.5e-4, 1e-4, 1e-5};
  std::ostringstream d;
  bool ok = true;
  for (int side = 0; side < 2; ++side) {
    double prev = INFINITY, smallest = INFINITY;
    for (double delta : deltas) {
      const double diam = side == 0 ? clockwise_orbit(s - delta).diameter : anticlockwise_orbit(s + delta).diameter;
      if (!(diam < prev)) ok = false;
      prev = diam;
      smallest = std::min(smallest, diam);
    }
    if (!(smallest < 1e-3)) ok = false;
    d << (side == 0 ? "clockwise" : " anticlockwise") << " diameter at 1e-3: "
      << num(side == 0 ? clockwise_orbit(s - 1e-3).diameter : anticlockwise_orbit(s + 1e-3).diameter) << ";";
  }
  d << " both shrink monotonically below 1e-3 inside the window";
  return verdict(ok, d.str());
}

CheckOutcome spectrum_consistency() {
  const double s = golden_mean();
  double worst = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double b = s + (1.0 - s) * k / 40.0;
    const PeriodicOrbitSpec o = anticlockwise_orbit(b);
    const StabilityReport r = stability_matrix(b);
    const double ratio = o.section_n[1] / o.section_n[0];
    double best = INFINITY;
    for (const auto& l : r.eigenvalues) best = std::min(best, std::abs(l - std::complex<double>(ratio, 0.0)));
    worst = std::max(worst, best);
  }
  // the closed-form matrix agrees with finite differences of the simulated map
  const PeriodicOrbitSpec o = anticlockwise_orbit(0.8);
  const double fd = (numerical_section_jacobian(o) -
                     anticlockwise_stability_closed_form(0.8, o.section_n[0], o.section_n[1]))
                        .max_abs();
  return verdict(worst <= 1e-9 && fd <= 1e-6,
                 "max |lambda - n2/n1| " + num(worst) + "; closed form vs finite differences " + num(fd));
}

Vec null_vector(const Matrix& k) {
  // cross product of the two rows with the largest cross product
  Vec best;
  double bn = -1.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      const Vec a = k.row(i), b = k.row(j);
      const Vec c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
      if (norm2(c) > bn) {
        bn = norm2(c);
        best = c;
      }
    }
  return (1.0 / bn) * best;
}

CheckOutcome tau_signature() {
  const TauResult t = find_tau(golden_mean() + 0.01, 0.99, 1e-13);
  const PeriodicOrbitSpec o = anticlockwise_orbit(t.tau);
  const StabilityReport r = stability_matrix(t.tau);
  const Vec v = null_vector(r.matrix + Matrix::identity(3));
  double worst_c = 0.0;
  for (double h : {2e-3, 1e-3, 5e-4, 2.5e-4}) {
    const Vec x = h * v;
    const Vec y = section_return(o, section_return(o, x));
    worst_c = std::max(worst_c, max_abs_diff(y, x) / (h * h * h));
  }
  return verdict(worst_c <= 10.0, "tau " + num(t.tau) + ", max |P^2(x)-x|/|x|^3 " + num(worst_c));
}

CheckOutcome clockwise_attracting() {
  std::ostringstream d;
  bool ok = true;
  for (double b : {0.0, 0.2, 0.4, 0.6}) {
    const StabilityReport r = stability_matrix(b);
    double m = 0.0;
    for (const auto& l : r.eigenvalues) m = std::max(m, std::abs(l));
    if (!(m < 1.0) || r.classification != Stability::Attracting) ok = false;
    d << "beta " << num(b) << ": max |lambda| " << num(m) << "; ";
  }
  return verdict(ok, d.str());
}

CheckOutcome j_orbit_properties() {
  double worst = 0.0;
  for (double b : {0.65, 0.7, 0.8, 0.9, 1.0}) {
    const JOrbitSpec j = j_orbit(b);
    worst = std::max({worst, j.orbit.closure_residual, std::abs(j.ratio_b - j.ratio_b_from_n1),
                      std::abs(j.ratio_a - j.ratio_a_from_n1), std::abs(j_map_F(b, j.orbit.root) - j.orbit.root)});
  }
  const JOrbitSpec one = j_orbit(1.0);
  const double r1 = std::max(std::abs(one.ratio_b - 1.0 / 3), std::abs(one.ratio_a - 0.25));
  bool threw = false;
  try {
    j_orbit(golden_mean() - 0.01);
  } catch (const ExistenceError&) {
    threw = true;
  }
  return verdict(worst <= 1e-9 && r1 <= 1e-12 && threw,
                 "closure/ratio residual " + num(worst) + ", ratios at beta=1 off by " + num(r1));
}

// ------------------------------------------------------------------ return map

double section_slack(const BimatrixGame& g, const SectionId& s, const Vec& z) {
  const StateV v = section_state(s, z, g.beta().value_or(0.0));
  Vec pa, pb;
  {
    const Vec ones(3, 1.0);
    pb = g.a_inverse() * (v.vA + g.a_shift() * ones);
    pa = row_times(v.vB + g.b_shift() * ones, g.b_inverse());
  }
  double slack = INFINITY;
  for (double x : pa) slack = std::min(slack, x);
  for (double x : pb) slack = std::min(slack, x);
  const Vec& vs = s.switching == Player::A ? v.vA : v.vB;
  const Vec& vo = s.switching == Player::A ? v.vB : v.vA;
  slack = std::min(slack, vs[static_cast<std::size_t>(s.pair.first)] - vs[static_cast<std::size_t>(s.pair.third())]);
  for (std::size_t i = 0; i < 3; ++i)
    if (static_cast<int>(i) != s.stay) slack = std::min(slack, vo[static_cast<std::size_t>(s.stay)] - vo[i]);
  return slack;
}

CheckOutcome projective_fits() {
  double worst = 0.0, compose_err = 0.0, fixed_err = 0.0, e_err = 0.0;
  for (double beta : {-0.9, -0.5, -0.2, 0.0}) {
    Rng rng(108);
    const FirstReturn fr = first_return(beta, rng);
    worst = std::max(worst, fr.residual);
    const BimatrixGame g = make_shapley(beta);
    const SectionId s1 = cycle_section(0);
    SimConfig cfg;
    cfg.max_events = 6;
    cfg.codim2_policy = Codim2Policy::Abort;
    for (int k = 0; k < 20; ++k) {
      const StateV v = sample_section(g, s1, rng);
      const Trajectory tr = simulate_from(g, v, cfg);
      if (tr.segments.size() != 6) continue;
      compose_err = std::max(compose_err, max_abs_diff(fr.map.apply(section_coords(s1, v)),
                                                       section_coords(s1, tr.segments.back().end)));
    }
    const PeriodicOrbitSpec o = clockwise_orbit(beta);
    // the orbit's first segment ends on S1
    fixed_err = std::max(fixed_err, max_abs_diff(fr.fixed_point, section_coords(s1, o.full_path.front().end)));
    e_err = std::max(e_err, max_abs_diff(fr.map.apply(fr.e_coords), fr.e_coords));
  }
  std::ostringstream d;
  d << "fit residual " << num(worst) << ", composition vs direct " << num(compose_err) << ", fixed point vs orbit "
    << num(fixed_err) << ", E drift " << num(e_err);
  return verdict(worst < 1e-8 && compose_err < 1e-8 && fixed_err < 1e-8 && e_err < 1e-8, d.str());
}

CheckOutcome return_iterates_converge() {
  Rng rng(109);
  const FirstReturn fr = first_return(-0.5, rng);
  const BimatrixGame g = make_shapley(-0.5);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vec z = section_coords(cycle_section(0), sample_section(g, cycle_section(0), rng));
    for (int it = 0; it < 200; ++it) z = fr.map.apply(z);
    worst = std::max(worst, max_abs_diff(z, fr.fixed_point));
  }
  return verdict(worst < 1e-6, "max distance after 200 iterations " + num(worst));
}

CheckOutcome lines_to_lines() {
  Rng rng(110);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (double beta : {-0.5, 0.0}) {
    const FirstReturn fr = first_return(beta, rng);
    const BimatrixGame g = make_shapley(beta);
    for (std::size_t piece = 0; piece < fr.pieces.size(); ++piece) {
      const SectionId s = cycle_section(static_cast<int>(piece));
      const Vec a = section_coords(s, sample_section(g, s, rng));
      const Vec b = section_coords(s, sample_section(g, s, rng));
      std::vector<Vec> pts;
      for (double t : {0.1, 0.35, 0.6, 0.9}) pts.push_back(lerp(a, b, t));
      // cross ratio of the four parameters before and after the map
      std::vector<Vec> img;
      for (const auto& p : pts) img.push_back(fr.pieces[piece].apply(p));
      auto param = [&](const Vec& p) { return dot(p - img[0], img[3] - img[0]) / dot(img[3] - img[0], img[3] - img[0]); };
      auto off_line = [&](const Vec& p) {
        const double t = param(p);
        return max_abs_diff(p, lerp(img[0], img[3], t));
      };
      const double t1 = param(img[1]), t2 = param(img[2]);
      auto cr = [](double x0, double x1, double x2, double x3) {
        return ((x2 - x0) * (x3 - x1)) / ((x2 - x1) * (x3 - x0));
      };
      const double before = cr(0.1, 0.35, 0.6, 0.9), after = cr(0.0, t1, t2, 1.0);
      worst = std::max({worst, off_line(img[1]), off_line(img[2]), std::abs(before - after)});
    }
  }
  return verdict(worst <= 1e-8, "collinearity and cross-ratio error " + num(worst));
}

CheckOutcome section_maps_inside() {
  Rng rng(111);
  std::normal_distribution<double> nd;
  double worst_slack = INFINITY;
  std::size_t near_e = 0, total = 0;
  bool ok = true;
  for (double beta : {-0.5, 0.0}) {
    const BimatrixGame g = make_shapley(beta);
    const FirstReturn fr = first_return(beta, rng);
    const SectionId s1 = cycle_section(0);
    for (int k = 0; k < 200; ++k) {
      const Vec z0 = section_coords(s1, sample_section(g, s1, rng));
      Vec dir{nd(rng), nd(rng), nd(rng)};
      double lo = 0.0, hi = 1.0;
      while (section_slack(g, s1, z0 + hi * dir) > 0) hi *= 2;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (section_slack(g, s1, z0 + mid * dir) > 0 ? lo : hi) = mid;
      }
      const Vec zb = z0 + lo * dir;  // on the boundary of the closed section
      const Vec img = fr.map.apply(zb);
      ++total;
      if (max_abs_diff(zb, fr.e_coords) < 1e-6) {
        ++near_e;
        continue;
      }
      const double sl = section_slack(g, s1, img);
      worst_slack = std::min(worst_slack, sl);
      if (!(sl > 0.0)) ok = false;
    }
  }
  return verdict(ok, std::to_string(total) + " boundary points, smallest image slack " + num(worst_slack));
}

CheckOutcome composition_order() {
  const auto& cycle = shapley_cycle();
  for (double beta : {-0.5, 0.0}) {
    const TransitionDiagram d = diagram_for(beta);
    for (int k = 0; k < 6; ++k) {
      const SectionId s = cycle_section(k);
      const RegionLabel from = cycle[static_cast<std::size_t>(k)], to = cycle[static_cast<std::size_t>((k + 1) % 6)];
      if (!d.arcs.count({from, to})) return verdict(false, to_string(s) + " is not a diagram arc");
      const RegionLabel after = s.switching == Player::A ? RegionLabel{s.to, s.stay} : RegionLabel{s.stay, s.to};
      if (after != to) return verdict(false, to_string(s) + " does not lead to the next cycle region");
    }
  }
  // associativity of composition
  Rng rng(112);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_map = [&] {
    Matrix h(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) h(i, j) = (i == j ? 2.0 : 0.0) + 0.3 * u(rng);
    return ProjectiveMap(h);
  };
  const ProjectiveMap a = random_map(), b = random_map(), c = random_map();
  const double assoc = (compose(compose(a, b), c).homogeneous() - compose(a, compose(b, c)).homogeneous()).max_abs();
  return verdict(assoc <= 1e-12, "sections follow the cycle arcs; associativity error " + num(assoc));
}

CheckOutcome global_attraction() {
  const AttractionReport r = attraction_check(-0.5, 200, 300, 113);
  return verdict(r.converged_fraction == 1.0, "beta -0.5: fraction " + num(r.converged_fraction) + ", worst " +
                                                  num(r.worst_distance) + ", outliers " +
                                                  std::to_string(r.outliers.size()));
}

// ------------------------------------------------------------ transition graph

CheckOutcome diagram_soundness() {
  Rng rng(114);
  std::size_t runs = 0, bad = 0;
  std::map<double, std::set<Arc>> seen;
  std::string first;
  for (int k = 0; k < 1000; ++k) {
    const double beta = kBetaGrid[static_cast<std::size_t>(k) % kBetaGrid.size()];
    const BimatrixGame g = make_shapley(beta);
    SimConfig cfg;
    cfg.max_events = 300;
    const auto it = itinerary(simulate(g, sample_state(rng, 3), cfg));
    ++runs;
    if (const auto v = validate_itinerary(it, diagram_for(beta))) {
      if (bad++ == 0) first = " (first at beta " + num(beta) + ", index " + std::to_string(*v) + ")";
    }
    for (std::size_t i = 1; i < it.size(); ++i)
      if (it[i - 1].region && it[i].region) seen[beta].insert({*it[i - 1].region, *it[i].region});
  }
  // witness test: every drawn arc is used by some simulated run in its regime
  std::size_t unwitnessed = 0;
  for (auto regime : {-0.5, 0.0, 0.5}) {
    std::set<Arc> used;
    for (const auto& [b, arcs] : seen)
      if ((b < 0) == (regime < 0) && (b == 0) == (regime == 0)) used.insert(arcs.begin(), arcs.end());
    for (const auto& a : diagram_for(regime).arcs)
      if (!used.count(a)) ++unwitnessed;
  }
  return verdict(bad == 0 && unwitnessed == 0, std::to_string(runs) + " itineraries, " + std::to_string(bad) +
                                                   " violations" + first + ", " + std::to_string(unwitnessed) +
                                                   " unwitnessed arcs");
}

CheckOutcome diagram_structure() {
  std::ostringstream d;
  bool ok = true;
  for (double beta : {-0.5, 0.0, 0.5}) {
    const TransitionDiagram dg = diagram_for(beta);
    const bool cw = arc_realizable(dg, shapley_pattern());
    const bool acw = arc_realizable(dg, anti_shapley_pattern());
    if (!cw || acw != (beta > 0)) ok = false;
  }
  const TransitionDiagram pos = diagram_for(0.5);
  int spiral = 0, trans = 0;
  for (const auto& [k, t] : pos.corners) (t == CornerType::Spiral ? spiral : trans)++;
  if (spiral != 6 || trans != 3) ok = false;
  if (diagram_for(0.0).ambiguous_faces.size() != 6) ok = false;
  if (!diagram_for(1.0).degenerate_exits) ok = false;
  // at beta<0 the only directed cycle is the six-region cycle
  const TransitionDiagram neg = diagram_for(-0.5);
  std::map<RegionLabel, std::vector<RegionLabel>> out;
  for (const auto& a : neg.arcs) out[a.from].push_back(a.to);
  std::size_t cycles = 0;
  std::function<void(const RegionLabel&, const RegionLabel&, std::set<RegionLabel>&)> dfs =
      [&](const RegionLabel& start, const RegionLabel& at, std::set<RegionLabel>& on_path) {
        for (const auto& nx : out[at]) {
          if (nx == start) {
            ++cycles;
          } else if (start < nx && !on_path.count(nx)) {
            on_path.insert(nx);
            dfs(start, nx, on_path);
            on_path.erase(nx);
          }
        }
      };
  for (const auto& [r, _] : out) {
    std::set<RegionLabel> path{r};
    dfs(r, r, path);
  }
  if (cycles != 1) ok = false;
  d << "cycle realizability per regime, 6 spiral + 3 transversal corners, 6 ambiguous faces, " << cycles
    << " cycle(s) at beta<0";
  return verdict(ok, d.str());
}

CheckOutcome j_spiral_itinerary() {
  const JOrbitSpec j = j_orbit(0.8);
  SimConfig cfg;
  cfg.max_events = 60;
  const BimatrixGame g = make_shapley(0.8);
  const auto it = itinerary(simulate_from(g, j.endpoints[0], cfg));
  std::size_t legs = 0;
  for (const auto& e : it) legs += e.leg ? 1 : 0;
  const auto v = validate_itinerary(it, diagram_for(0.8));
  return verdict(!v && legs == it.size(), std::to_string(legs) + " J legs followed, valid " + (v ? "no" : "yes"));
}

CheckOutcome named_patterns() {
  auto run = [](double beta, std::uint64_t seed, std::size_t events) {
    Rng rng(seed);
    SimConfig cfg;
    cfg.max_events = events;
    const BimatrixGame g = make_shapley(beta);
    return itinerary(simulate(g, sample_state(rng, 3), cfg));
  };
  std::size_t neg = 0, pos = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    if (pattern_match(run(-0.5, seed, 300), shapley_pattern(), 5)) ++neg;
    if (pattern_match(run(0.95, seed, 600), anti_shapley_pattern(), 5)) ++pos;
  }
  // hand-built violation
  std::vector<ItineraryEntry> bad{{RegionLabel{0, 1}, std::nullopt, 0.1, 0.1},
                                  {RegionLabel{2, 2}, std::nullopt, 0.1, 0.1}};
  const auto v = validate_itinerary(bad, diagram_for(-0.5));
  return verdict(neg == 10 && pos >= 1 && v && *v == 1,
                 "Shapley pattern " + std::to_string(neg) + "/10 at beta -0.5, anti-Shapley " + std::to_string(pos) +
                     "/10 at beta 0.95");
}

// --------------------------------------------------------------------- cli/io

CheckOutcome determinism() {
  auto once = [] {
    Rng rng(7);
    const BimatrixGame g = make_shapley(-0.5);
    SimConfig cfg;
    cfg.max_events = 300;
    const Trajectory tr = simulate(g, sample_state(rng, 3), cfg);
    return trajectory_csv(g, tr) + itinerary_json(itinerary(tr)) + scan_csv_row(scan_point(0.8));
  };
  return verdict(once() == once(), "identical seed gives identical output");
}

}  // namespace

const std::vector<InvariantCheck>& invariant_checks() {
  static const std::vector<InvariantCheck> checks{
      {"game_core", "utility sums are 1+beta and 1-beta", utility_sums},
      {"game_core", "Shapley matrices entrywise", shapley_entries},
      {"game_core", "best response argmax invariance and margin", argmax_invariance},
      {"game_core", "Shapley equilibrium is the barycenter", shapley_equilibrium},
      {"game_core", "zero-sum certificate minimized at sigma", zero_sum_minimum},
      {"game_core", "utility/simplex round trip", round_trip},
      {"indifference_geometry", "classification matches the 2x2 flow oracle", oracle_equivalence},
      {"indifference_geometry", "J and T leg classes per regime", leg_classes},
      {"indifference_geometry", "indifference anchors", anchors},
      {"flow_engine", "conservation, chaining, affinity, event exactness", trajectory_properties},
      {"flow_engine", "no ambiguity for beta in (0,1)", no_ambiguity_positive_beta},
      {"flow_engine", "J-flow gap recursion equals F", j_gap_recursion},
      {"orbit_analysis", "cubic sign patterns", cubic_signs},
      {"orbit_analysis", "orbit closure under simulation", orbit_closure},
      {"orbit_analysis", "orbits shrink to E at sigma", sigma_degeneracy},
      {"orbit_analysis", "eigenvalue n2/n1 and closed-form matrix", spectrum_consistency},
      {"orbit_analysis", "period-doubling signature at tau", tau_signature},
      {"orbit_analysis", "clockwise orbit attracting on [0,sigma)", clockwise_attracting},
      {"orbit_analysis", "J orbit closure and ratios", j_orbit_properties},
      {"return_map", "projective fits, composition, fixed point, E", projective_fits},
      {"return_map", "first-return iterates converge", return_iterates_converge},
      {"return_map", "lines map to lines, cross ratio kept", lines_to_lines},
      {"return_map", "closed section maps inside", section_maps_inside},
      {"return_map", "composition order and associativity", composition_order},
      {"return_map", "global attraction at beta -0.5", global_attraction},
      {"transition_graph", "soundness and witnessed arcs", diagram_soundness},
      {"transition_graph", "diagram structure", diagram_structure},
      {"transition_graph", "J spiral itinerary validates", j_spiral_itinerary},
      {"transition_graph", "named patterns", named_patterns},
      {"cli_app", "deterministic output", determinism},
  };
  return checks;
}

std::vector<CheckResult> run_invariant_suite(bool parallel) {
  const auto& checks = invariant_checks();
  auto one = [](const InvariantCheck& c) {
    CheckResult r{c.module, c.name, false, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const CheckOutcome o = c.run();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };
  std::vector<CheckResult> out;
  if (!parallel) {
    for (const auto& c : checks) out.push_back(one(c));
    return out;
  }
  std::vector<std::future<CheckResult>> futs;
  for (const auto& c : checks) futs.push_back(std::async(std::launch::async, one, std::cref(c)));
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

}  // namespace fpdyn
