#include "fpdyn/orbits.hpp"

#include <algorithm>
#include <cmath>

#include "fpdyn/errors.hpp"

namespace fpdyn {

std::string to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::Clockwise: return "clockwise";
    case OrbitKind::Anticlockwise: return "anticlockwise";
    case OrbitKind::JOrbit: return "j";
  }
  return "?";
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Attracting: return "Attracting";
    case Stability::SaddleType: return "SaddleType";
    case Stability::NonGeneric: return "NonGeneric";
  }
  return "?";
}

Cubic clockwise_cubic(double b) {
  const double b2 = b * b, b3 = b2 * b;
  return {3 * b2 + 3 * b + 3, 2 * b3 - 2 * b2 - 5 * b - 4, -b3 + 4 * b + 3, -1 - b};
}

Cubic anticlockwise_cubic(double b) {
  const double b2 = b * b, b3 = b2 * b;
  return {3 * b2 + 3 * b + 3 * b3, -5 * b3 - 7 * b2 - 4 * b - 2, 1 + b + 5 * b2 + 2 * b3, -b2};
}

double orbit_diameter(const std::vector<Segment>& path) {
  double d = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i)
    for (std::size_t j = i + 1; j < path.size(); ++j) {
      const auto& x = path[i].start;
      const auto& y = path[j].start;
      d = std::max({d, max_abs_diff(x.vA, y.vA), max_abs_diff(x.vB, y.vB)});
    }
  return d;
}

namespace {

const std::vector<RegionLabel>& expected_route(OrbitKind k) {
  // clockwise: (1,2),(2,2),(2,3),(3,3),(3,1),(1,1); anticlockwise: (1,2),(3,2),(3,1),(2,1),(2,3),(1,3)
  static const std::vector<RegionLabel> cw{{0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}, {0, 0}};
  static const std::vector<RegionLabel> acw{{0, 1}, {2, 1}, {2, 0}, {1, 0}, {1, 2}, {0, 2}};
  return k == OrbitKind::Clockwise ? cw : acw;
}

SimConfig route_config(std::size_t events) {
  SimConfig cfg;
  cfg.max_events = events;
  cfg.codim2_policy = Codim2Policy::Abort;
  return cfg;
}

void build_path(PeriodicOrbitSpec& o) {
  const BimatrixGame game = make_shapley(o.beta);
  const StateV start{o.section_n, o.section_m};
  const Trajectory tr = simulate_from(game, start, route_config(6));
  const auto& route = expected_route(o.kind);
  if (tr.segments.size() != 6) throw InvariantError("periodic orbit route ended early: " + describe(tr.stop));
  for (std::size_t k = 0; k < 6; ++k) {
    const auto r = tr.segments[k].region();
    if (!r || *r != route[k])
      throw InvariantError(to_string(o.kind) + " orbit left its route at segment " + std::to_string(k + 1));
  }
  o.full_path = tr.segments;
  const StateV& end = tr.segments.back().end;
  o.closure_residual = std::max(max_abs_diff(end.vA, start.vA), max_abs_diff(end.vB, start.vB));
  o.diameter = orbit_diameter(o.full_path);
}

void check_beta_range(double beta) {
  if (!(beta > -1.0 && beta <= 1.0)) throw ParameterError("beta must lie in (-1, 1]");
}

}  // namespace

PeriodicOrbitSpec clockwise_orbit(double beta) {
  check_beta_range(beta);
  if (beta >= golden_mean())
    throw ExistenceError("the clockwise Shapley orbit no longer exists for beta >= sigma");
  const double b = beta, b2 = b * b, b3 = b2 * b;
  const double nu = cubic_root_in(clockwise_cubic(b), 0.0, 1.0);
  const double q = 1 + b + b2;
  PeriodicOrbitSpec o;
  o.kind = OrbitKind::Clockwise;
  o.beta = beta;
  o.root = nu;
  const double n1 = nu;
  const double n2 = -(-2 * b2 - b3 + 2 * nu * b3 - 3 * nu * b - 2 * nu + 3 * nu * nu + 3 * nu * nu * b2 +
                      3 * nu * nu * b) /
                    q;
  const double n3 = (2 * b + 1 + 2 * nu * b3 - nu * b2 - 4 * nu * b - 3 * nu + 3 * nu * nu +
                     3 * nu * nu * b2 + 3 * nu * nu * b) /
                    q;
  const double m1 = 1 - nu - nu * b;
  const double m3 = -b + 2 * nu * b - 1 + 2 * nu;
  o.section_n = {n1, n2, n3};
  o.section_m = {m1, m1, m3};
  if (!(n1 > std::max(n2, n3) && m1 > m3))
    throw InvariantError("clockwise section inequalities fail at beta=" + std::to_string(beta));
  o.t1 = (n1 - n2) / (n1 - n2 + 1);
  const double delta = (m1 - m3) + (n1 - n2);
  o.t2 = delta / (delta + (1 + b) * (1 + n1 - n2));
  build_path(o);
  return o;
}

PeriodicOrbitSpec anticlockwise_orbit(double beta) {
  check_beta_range(beta);
  if (beta <= golden_mean())
    throw ExistenceError("the anticlockwise orbit exists only for beta > sigma");
  const double b = beta, b2 = b * b, b3 = b2 * b;
  const Cubic c = anticlockwise_cubic(b);
  double hi = 2.0;
  while (eval_cubic(c, hi) <= 0) hi *= 2;
  const std::array<double, 3> roots{cubic_root_in(c, 0.0, 1.0 / 3.0), cubic_root_in(c, 1.0 / 3.0, 1.0),
                                    cubic_root_in(c, 1.0, hi)};
  const double q = 1 + b + b2;
  std::vector<PeriodicOrbitSpec> found;
  for (double mu : roots) {
    PeriodicOrbitSpec o;
    o.kind = OrbitKind::Anticlockwise;
    o.beta = beta;
    o.root = mu;
    const double mu2 = mu * mu;
    const double n1 = b - mu * b;
    const double n2 =
        (2 * b2 + 1 - 3 * mu * b3 - 5 * mu * b2 - 2 * mu * b - 2 * mu + 3 * mu2 * b2 + 3 * mu2 * b + 3 * mu2 * b3) / q;
    const double n3 = -(b2 - b - 4 * mu * b3 - 6 * mu * b2 - 3 * mu * b - 2 * mu + 3 * mu2 * b2 + 3 * mu2 * b +
                        3 * mu2 * b3) /
                      q;
    const double m1 = 1 - b - 2 * mu;
    o.section_n = {n1, n2, n3};
    o.section_m = {m1, mu, mu};
    if (!(mu > m1 && n1 > std::max(n2, n3) && (n1 - n2) * b > n1 - n3)) continue;
    o.t1 = (n1 - n3) / (n1 - n3 + b);
    const double delta = b * (mu - m1) + (1 + b) * (n1 - n3);
    o.t2 = delta / (delta + b + n1 - n3);
    found.push_back(o);
  }
  if (found.empty()) throw ExistenceError("no root of the anticlockwise cubic satisfies the section inequalities");
  if (found.size() > 1) throw InvariantError("several roots satisfy the anticlockwise section inequalities");
  build_path(found.front());
  return found.front();
}

double j_map_F(double beta, double x) {
  const double b = beta, c = 1 - b + b * b;
  return x * (1 + b) * (1 + 2 * b) * c / ((2 - b) * (3 * (1 + b) * (1 + b) * x + (2 + b) * c));
}

double j_fixed_point(double beta) {
  const double b = beta;
  if (b <= golden_mean()) return 0.0;
  return (1 + b * b - b) * (b * b + b - 1) / ((2 - b) * (1 + b) * (1 + b));
}

double j_map_derivative_at_zero(double beta) {
  const double b = beta;
  return (2 * b * b + 3 * b + 1) / (4 - b * b);
}

JOrbitSpec j_orbit(double beta) {
  check_beta_range(beta);
  if (beta <= golden_mean()) throw ExistenceError("the orbit on J degenerates to E for beta <= sigma");
  const double b = beta;
  const double x = j_fixed_point(b);
  JOrbitSpec j;
  PeriodicOrbitSpec& o = j.orbit;
  o.kind = OrbitKind::JOrbit;
  o.beta = b;
  o.root = x;
  o.section_n = {(1 + b - 2 * x) / 3, (1 + b + x) / 3, (1 + b + x) / 3};
  o.section_m = Vec(3, (1 - b) / 3);
  StateV v{o.section_n, o.section_m};
  for (int leg = 0; leg < 6; ++leg) {
    Segment s = j_flow_step(b, v);
    v = s.end;
    j.endpoints.push_back(v);
    o.full_path.push_back(std::move(s));
  }
  o.t1 = o.full_path[0].duration_s;
  o.t2 = o.full_path[1].duration_s;
  o.closure_residual = std::max(max_abs_diff(v.vA, o.section_n), max_abs_diff(v.vB, o.section_m));
  o.diameter = orbit_diameter(o.full_path);
  j.ratio_b = (b * b + b - 1) / (2 * b + 1);
  j.ratio_a = (b * b + b - 1) / ((1 + b) * (1 + b));
  const double n1 = o.section_n[0];
  j.ratio_b_from_n1 = ((1 + b) / 3 - n1) / ((1 + b * b) / (1 + b) - n1);
  j.ratio_a_from_n1 = ((1 + b) / 3 - n1) / ((1 + b) / 3 - (b - b * b) / (2 - b));
  return j;
}

namespace {

Vec rotate(const Vec& v, int k) {  // out[(i + k) mod 3] = v[i]
  Vec out(3);
  for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>((i + k + 3) % 3)] = v[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

Vec section_return(const PeriodicOrbitSpec& o, const Vec& eps) {
  if (o.kind == OrbitKind::JOrbit) throw ParameterError("section_return is defined for the symmetric orbits");
  if (eps.size() != 3) throw StructuralError("perturbation needs three coordinates");
  const bool cw = o.kind == OrbitKind::Clockwise;
  const Vec& n = o.section_n;
  const Vec& m = o.section_m;
  StateV s{{n[0] + eps[0], n[1] + eps[1], n[2] - eps[0] - eps[1]}, m};
  if (cw) {
    s.vB = {m[0] + eps[2], m[1] + eps[2], m[2] - 2 * eps[2]};
  } else {
    s.vB = {m[0] - 2 * eps[2], m[1] + eps[2], m[2] + eps[2]};
  }
  const Trajectory tr = simulate_from(make_shapley(o.beta), s, route_config(2));
  const auto& route = expected_route(o.kind);
  if (tr.segments.size() != 2 || tr.segments[0].region() != route[0] || tr.segments[1].region() != route[1])
    throw ModelError("perturbed state left the orbit's route");
  const StateV& e = tr.segments.back().end;
  // the end state is the section state with coordinates permuted cyclically
  const int k = cw ? -1 : 1;
  const Vec na = rotate(e.vA, k);
  const Vec mb = rotate(e.vB, k);
  return {na[0] - n[0], na[1] - n[1], cw ? mb[0] - m[0] : mb[1] - m[1]};
}

Matrix numerical_section_jacobian(const PeriodicOrbitSpec& o, double h) {
  Matrix jac(3, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    auto central = [&](double step) {
      Vec ep(3, 0.0), em(3, 0.0);
      ep[j] = step;
      em[j] = -step;
      const Vec fp = section_return(o, ep), fm = section_return(o, em);
      Vec d(3);
      for (std::size_t i = 0; i < 3; ++i) d[i] = (fp[i] - fm[i]) / (2 * step);
      return d;
    };
    const Vec d1 = central(h), d2 = central(h / 2);
    for (std::size_t i = 0; i < 3; ++i) jac(i, j) = (4 * d2[i] - d1[i]) / 3;
  }
  return jac;
}

Matrix anticlockwise_stability_closed_form(double b, double n1, double n2) {
  Matrix m{{b * (3 + 2 * b) - 2 * n1 * (2 + b), b * (1 - n1 + b) - 2 * n1, 3 * b * b - 3 * n1 * b},
           {b - 2 * n2 * (2 + b), -n2 * (2 + b), -3 * n2 * b},
           {2 - 2 * (b - n1) * (2 + b) / b, 1 - (b - n1) * (2 + b) / b, 3 * n1 - 2 * b}};
  return m * (n2 / (n1 * b));
}

std::array<std::complex<double>, 2> anticlockwise_eigenvalue_pair(double b, double n1, double n2) {
  const double b2 = b * b, b3 = b2 * b, b4 = b3 * b;
  const double delta = 10 * n1 * n2 * b + 4 * n1 * n2 - 4 * n2 * b2 - 4 * n2 * b3 - 8 * n1 * b3 + 4 * b4 +
                       4 * n2 * n2 + 4 * n2 * n2 * b + 4 * n1 * n1 * b2 + 4 * n1 * n1 * b + n2 * n2 * b2 +
                       4 * n2 * b2 * n1 - 8 * n1 * b2 + n1 * n1 - 4 * n2 * b - 8 * n1 * b + 4 * b2 + 4 * b3;
  const std::complex<double> root = std::sqrt(std::complex<double>(delta, 0.0));
  const double base = -2 * n1 * b - n1 - 2 * n2 - n2 * b + 2 * b2;
  const double scale = n2 / (2 * n1 * b);
  return {scale * (base + root), scale * (base - root)};
}

namespace {

Stability classify_spectrum(const std::array<std::complex<double>, 3>& ev) {
  bool outside = false;
  for (const auto& l : ev) {
    const double r = std::abs(l);
    if (std::abs(r - 1.0) <= 1e-9) return Stability::NonGeneric;
    if (r > 1.0) outside = true;
  }
  return outside ? Stability::SaddleType : Stability::Attracting;
}

}  // namespace

StabilityReport stability_matrix(double beta) {
  check_beta_range(beta);
  StabilityReport rep;
  rep.beta = beta;
  if (beta > golden_mean()) {
    const PeriodicOrbitSpec o = anticlockwise_orbit(beta);
    rep.kind = OrbitKind::Anticlockwise;
    rep.matrix = anticlockwise_stability_closed_form(beta, o.section_n[0], o.section_n[1]);
  } else if (beta < golden_mean()) {
    const PeriodicOrbitSpec o = clockwise_orbit(beta);
    rep.kind = OrbitKind::Clockwise;
    rep.matrix = numerical_section_jacobian(o);
    rep.numerical = true;
  } else {
    throw ExistenceError("both symmetric orbits collapse onto E at beta = sigma");
  }
  rep.eigenvalues = eigenvalues3(rep.matrix);
  rep.classification = classify_spectrum(rep.eigenvalues);
  return rep;
}

namespace {

double most_negative_real_eigenvalue(double beta) {
  const StabilityReport rep = stability_matrix(beta);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : rep.eigenvalues)
    if (std::abs(l.imag()) <= 1e-12) m = std::min(m, l.real());
  if (!std::isfinite(m)) throw SearchError("no real eigenvalue at beta=" + std::to_string(beta));
  return m;
}

}  // namespace

TauResult find_tau(double lo, double hi, double tol) {
  if (!(lo < hi) || lo <= golden_mean() || hi > 1.0)
    throw ParameterError("tau bracket must satisfy sigma < lo < hi <= 1");
  if (!(tol > 0)) throw ParameterError("tolerance must be positive");
  auto g = [](double b) { return most_negative_real_eigenvalue(b) + 1.0; };
  double glo = g(lo);
  const double ghi = g(hi);
  if ((glo > 0) == (ghi > 0)) throw SearchError("no eigenvalue crossing -1 inside the bracket");
  TauResult res;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    ++res.iterations;
    if (std::abs(gm) <= tol || hi - lo <= 1e-15) {
      res.tau = mid;
      res.g = gm;
      return res;
    }
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
}

TauResult find_tau() { return find_tau(golden_mean() + 0.01, 0.99); }

}  // namespace fpdyn
