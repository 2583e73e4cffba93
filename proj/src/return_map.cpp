#include "fpdyn/return_map.hpp"

#include <cmath>

#include "fpdyn/errors.hpp"

namespace fpdyn {

ProjectiveMap::ProjectiveMap(Matrix h) : h_(std::move(h)) {
  if (!h_.square() || h_.rows() < 2) throw StructuralError("homogeneous matrix must be square, size >= 2");
  const std::size_t d = h_.rows() - 1;
  const double corner = h_(d, d);
  const double scale = h_.max_abs();
  if (scale == 0.0) throw StructuralError("homogeneous matrix is zero");
  if (std::abs(corner) > 1e-9 * scale)
    h_ = h_ * (1.0 / corner);
  else
    h_ = h_ * (1.0 / scale);
}

ProjectiveMap ProjectiveMap::identity(std::size_t d) { return ProjectiveMap(Matrix::identity(d + 1)); }

double ProjectiveMap::denominator(const Vec& z) const {
  const std::size_t d = dim();
  if (z.size() != d) throw StructuralError("point dimension does not match the map");
  double f = h_(d, d);
  for (std::size_t c = 0; c < d; ++c) f += h_(d, c) * z[c];
  return f;
}

Vec ProjectiveMap::apply(const Vec& z) const {
  const std::size_t d = dim();
  const double f = denominator(z);
  if (f == 0.0) throw DomainError("point maps to infinity", z);
  Vec w(d);
  for (std::size_t r = 0; r < d; ++r) {
    double x = h_(r, d);
    for (std::size_t c = 0; c < d; ++c) x += h_(r, c) * z[c];
    w[r] = x / f;
  }
  return w;
}

ProjectiveMap compose(const ProjectiveMap& t2, const ProjectiveMap& t1) {
  if (t1.dim() != t2.dim()) throw StructuralError("composing maps of different dimension");
  return ProjectiveMap(t2.homogeneous() * t1.homogeneous());
}

const std::array<RegionLabel, 6>& shapley_cycle() {
  static const std::array<RegionLabel, 6> c{{{0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}, {0, 0}}};
  return c;
}

SectionId cycle_section(int index) {
  if (index < 0 || index > 5) throw ParameterError("section index must be in 0..5");
  const auto& c = shapley_cycle();
  const RegionLabel r = c[static_cast<std::size_t>(index)];
  const RegionLabel next = c[static_cast<std::size_t>((index + 1) % 6)];
  SectionId s;
  s.index = index;
  if (r.a != next.a) {
    s.switching = Player::A;
    s.from = r.a;
    s.to = next.a;
    s.stay = r.b;
  } else {
    s.switching = Player::B;
    s.from = r.b;
    s.to = next.b;
    s.stay = r.a;
  }
  s.pair = TiePair(s.from, s.to);
  return s;
}

std::string to_string(const SectionId& s) { return "S" + std::to_string(s.index + 1); }

Vec section_coords(const SectionId& s, const StateV& v) {
  const Vec& x = s.switching == Player::A ? v.vA : v.vB;
  const Vec& y = s.switching == Player::A ? v.vB : v.vA;
  const double tied = 0.5 * (x[static_cast<std::size_t>(s.pair.first)] + x[static_cast<std::size_t>(s.pair.second)]);
  return {tied, y[0], y[1]};
}

StateV section_state(const SectionId& s, const Vec& z, double beta) {
  if (z.size() != 3) throw StructuralError("section coordinates are three-dimensional");
  const double sx = s.switching == Player::A ? 1 + beta : 1 - beta;
  const double sy = s.switching == Player::A ? 1 - beta : 1 + beta;
  Vec x(3);
  x[static_cast<std::size_t>(s.pair.first)] = z[0];
  x[static_cast<std::size_t>(s.pair.second)] = z[0];
  x[static_cast<std::size_t>(s.pair.third())] = sx - 2 * z[0];
  Vec y{z[1], z[2], sy - z[1] - z[2]};
  return s.switching == Player::A ? StateV{x, y} : StateV{y, x};
}

StateV sample_section(const BimatrixGame& game, const SectionId& s, Rng& rng) {
  const auto beta = game.beta();
  if (!beta) throw ParameterError("section sampling needs a Shapley-family game");
  const auto anchors = indifference_anchors(*beta);
  const IndifferenceLocus* locus = nullptr;
  for (const auto& l : anchors.loci)
    if (l.player == s.switching && l.pair == s.pair) locus = &l;
  if (locus == nullptr) throw StructuralError("no indifference segment for the section");
  std::uniform_real_distribution<double> unif(1e-3, 1.0 - 1e-3);
  const double t = unif(rng);
  const SimplexPoint p_opp(lerp(locus->from, locus->to, t));
  const Player y = other(s.switching);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const SimplexPoint p_sw(sample_simplex(rng, 3));
    StateP p = s.switching == Player::A ? StateP{p_sw, p_opp} : StateP{p_opp, p_sw};
    StateV v = utilities(game, p);
    const Vec& vy = y == Player::A ? v.vA : v.vB;
    const auto br = best_response_set(vy, 1e-6, y);
    if (!br.strict() || br.indices[0] != s.stay) continue;
    Vec& vx = s.switching == Player::A ? v.vA : v.vB;
    const double m = 0.5 * (vx[static_cast<std::size_t>(s.pair.first)] + vx[static_cast<std::size_t>(s.pair.second)]);
    vx[static_cast<std::size_t>(s.pair.first)] = m;
    vx[static_cast<std::size_t>(s.pair.second)] = m;
    return v;
  }
  throw SearchError("could not sample the section " + to_string(s));
}

StateV hit_map(const BimatrixGame& game, const SectionId& from, const SectionId& to, const StateV& v) {
  if (from == to) return v;
  if (to.index != (from.index + 1) % 6) throw ParameterError("hit_map joins consecutive sections only");
  SimConfig cfg;
  cfg.max_events = 1;
  cfg.codim2_policy = Codim2Policy::Abort;
  const Trajectory tr = simulate_from(game, v, cfg);
  const RegionLabel through = shapley_cycle()[static_cast<std::size_t>(to.index)];
  if (tr.segments.size() != 1 || tr.segments[0].region() != through)
    throw ModelError("flow from " + to_string(from) + " does not cross region " + to_string(through));
  const Event& e = tr.segments[0].end_event;
  if (e.kind != EventKind::SingleIndifference || e.player != to.switching || !(e.pair == to.pair))
    throw ModelError("flow from " + to_string(from) + " does not reach " + to_string(to) + ": " + describe(e));
  return tr.segments[0].end;
}

namespace {

// Solves for the 16 entries of H with entry `fixed` set to 1 (row-major).
std::optional<ProjectiveMap> fit_dlt_fixed(const std::vector<Vec>& z, const std::vector<Vec>& w, std::size_t fixed) {
  Matrix m(15, 15);
  Vec rhs(15);
  for (std::size_t k = 0; k < 5; ++k) {
    const Vec zt{z[k][0], z[k][1], z[k][2], 1.0};
    for (std::size_t r = 0; r < 3; ++r) {
      // H_r . zt - w_r H_3 . zt = 0
      Vec row(16, 0.0);
      for (std::size_t c = 0; c < 4; ++c) {
        row[4 * r + c] = zt[c];
        row[12 + c] = -w[k][r] * zt[c];
      }
      const std::size_t i = 3 * k + r;
      for (std::size_t c = 0, col = 0; c < 16; ++c) {
        if (c == fixed) continue;
        m(i, col++) = row[c];
      }
      rhs[i] = -row[fixed];
    }
  }
  Vec h;
  try {
    h = solve(m, rhs);
  } catch (const StructuralError&) {
    return std::nullopt;
  }
  h.insert(h.begin() + static_cast<std::ptrdiff_t>(fixed), 1.0);
  Matrix hm(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) hm(r, c) = h[4 * r + c];
  if (!std::isfinite(hm.max_abs()) || hm.max_abs() > 1e8) return std::nullopt;
  return ProjectiveMap(hm);
}

// Bottom-right entry first; others when the denominator has no constant term.
std::optional<ProjectiveMap> fit_dlt(const std::vector<Vec>& z, const std::vector<Vec>& w) {
  for (std::size_t k = 16; k-- > 0;)
    if (auto map = fit_dlt_fixed(z, w, k)) return map;
  return std::nullopt;
}

}  // namespace

ProjectiveFit projective_from_samples(const BimatrixGame& game, const SectionId& from, const SectionId& to,
                                      Rng& rng) {
  ProjectiveFit fit;
  if (from == to) {
    fit.attempts = 1;
    return fit;
  }
  for (int attempt = 1; attempt <= 20; ++attempt) {
    std::vector<Vec> z, w;
    for (int k = 0; k < 5; ++k) {
      const StateV v = sample_section(game, from, rng);
      z.push_back(section_coords(from, v));
      w.push_back(section_coords(to, hit_map(game, from, to, v)));
    }
    auto map = fit_dlt(z, w);
    if (!map) continue;
    double res = 0.0;
    for (int k = 0; k < 20; ++k) {
      const StateV v = sample_section(game, from, rng);
      const Vec pred = map->apply(section_coords(from, v));
      res = std::max(res, max_abs_diff(pred, section_coords(to, hit_map(game, from, to, v))));
    }
    fit.map = *map;
    fit.residual = res;
    fit.attempts = attempt;
    if (res >= 1e-8)
      throw ModelError("section map " + to_string(from) + " -> " + to_string(to) +
                       " is not projective (residual " + std::to_string(res) + ")");
    return fit;
  }
  throw ModelError("could not find samples in general position for " + to_string(from));
}

FirstReturn first_return(double beta, Rng& rng) {
  if (!(beta > -1.0 && beta <= 0.0))
    throw ParameterError("first-return maps are built for beta in (-1, 0] only");
  const BimatrixGame game = make_shapley(beta);
  FirstReturn fr;
  for (int k = 0; k < 6; ++k) {
    const ProjectiveFit f = projective_from_samples(game, cycle_section(k), cycle_section((k + 1) % 6), rng);
    fr.pieces.push_back(f.map);
    fr.residual = std::max(fr.residual, f.residual);
    fr.map = compose(f.map, fr.map);
  }
  const SectionId s1 = cycle_section(0);
  Vec x = section_coords(s1, sample_section(game, s1, rng));
  x.push_back(1.0);
  const Matrix& h = fr.map.homogeneous();
  for (int it = 0; it < 200000; ++it) {
    Vec y = h * x;
    const double nrm = norm2(y);
    for (double& c : y) c /= nrm;
    if (y[3] < 0)
      for (double& c : y) c = -c;
    const double change = max_abs_diff(x, y);
    x = std::move(y);
    if (change < 1e-15) break;
  }
  Vec z{x[0] / x[3], x[1] / x[3], x[2] / x[3]};
  for (int it = 0; it < 50; ++it) z = fr.map.apply(z);
  fr.fixed_point = z;
  fr.fixed_state = section_state(s1, z, beta);
  fr.e_coords = section_coords(s1, utilities(game, interior_equilibrium(game)));
  return fr;
}

AttractionReport attraction_check(double beta, std::size_t n_starts, std::size_t horizon, std::uint64_t seed,
                                  double radius) {
  Rng rng(seed);
  AttractionReport rep;
  rep.beta = beta;
  rep.n_starts = n_starts;
  rep.horizon = horizon;
  rep.first = first_return(beta, rng);
  const BimatrixGame game = make_shapley(beta);
  const SectionId s1 = cycle_section(0);
  const auto& cycle = shapley_cycle();
  SimConfig cfg;
  cfg.max_events = horizon;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < n_starts; ++i) {
    const StateP start = sample_state(rng, 3);
    std::optional<Trajectory> run;
    try {
      run = simulate(game, start, cfg);
    } catch (const Error& e) {
      rep.outliers.push_back({i, e.what(), std::numeric_limits<double>::infinity()});
      continue;
    }
    const Trajectory& tr = *run;
    const auto& segs = tr.segments;
    // last exit from region 1 into region 2
    std::optional<std::size_t> last;
    for (std::size_t k = segs.size(); k-- > 1;)
      if (segs[k - 1].region() == cycle[0] && segs[k].region() == cycle[1]) {
        last = k - 1;
        break;
      }
    if (!last || *last < 12) {
      rep.outliers.push_back({i, "did not settle on the six-region cycle: " + describe(tr.stop),
                              std::numeric_limits<double>::infinity()});
      continue;
    }
    bool on_cycle = true;
    for (std::size_t j = 0; j < 12; ++j) {
      const auto r = segs[*last - j].region();
      if (!r || *r != cycle[(6 - j % 6) % 6]) on_cycle = false;
    }
    const double d = max_abs_diff(section_coords(s1, segs[*last].end), rep.first.fixed_point);
    rep.worst_distance = std::max(rep.worst_distance, d);
    if (!on_cycle) {
      rep.outliers.push_back({i, "trailing itinerary is not the six-region cycle", d});
    } else if (d >= radius) {
      rep.outliers.push_back({i, "section state not within tolerance of the fixed point", d});
    } else {
      ++ok;
    }
  }
  rep.converged_fraction = n_starts ? static_cast<double>(ok) / static_cast<double>(n_starts) : 1.0;
  return rep;
}

}  // namespace fpdyn
