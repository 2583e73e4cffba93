#include "fpdyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fpdyn/errors.hpp"
#include "json.hpp"

namespace fpdyn {

using nlohmann::json;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) throw ParameterError(std::string("game spec: ") + name + " must be a matrix");
  std::vector<Vec> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ParameterError(std::string("game spec: ") + name + " rows must be arrays");
    Vec row;
    for (const auto& x : r) {
      if (!x.is_number()) throw ParameterError(std::string("game spec: ") + name + " entries must be numbers");
      row.push_back(x.get<double>());
    }
    rows.push_back(std::move(row));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const StructuralError& e) {
    throw ParameterError(std::string("game spec: ") + name + ": " + e.what());
  }
}

std::string play_label(const Play& p) {
  if (!p.mixed()) return std::to_string(p.pure + 1);
  return std::to_string(p.pair.first + 1) + "+" + std::to_string(p.pair.second + 1);
}

}  // namespace

BimatrixGame parse_game_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("game spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("game spec must be a JSON object");
  if (j.contains("family")) {
    if (j.size() != 2 || !j.contains("beta")) throw ParameterError("game spec: expected keys family and beta");
    if (j["family"] != "shapley") throw ParameterError("game spec: unknown family");
    if (!j["beta"].is_number()) throw ParameterError("game spec: beta must be a number");
    return make_shapley(j["beta"].get<double>());
  }
  if (j.size() != 2 || !j.contains("A") || !j.contains("B")) throw ParameterError("game spec: expected keys A and B");
  try {
    return BimatrixGame(matrix_from_json(j["A"], "A"), matrix_from_json(j["B"], "B"));
  } catch (const StructuralError& e) {
    throw ParameterError(std::string("game spec: ") + e.what());
  }
}

std::string event_label(const Event& e) {
  std::string s = to_string(e.kind);
  if (e.kind == EventKind::SingleIndifference) {
    s += std::string(" ") + player_name(e.player) + " " + std::to_string(e.pair.first + 1) + "-" +
         std::to_string(e.pair.second + 1);
  } else if (e.kind == EventKind::Codim2Hit) {
    if (e.leg) s += std::string(" ") + (e.leg->family == LegFamily::J ? "J" : "T") + std::to_string(e.leg->id);
    if (e.codim2) s += " " + to_string(*e.codim2);
  }
  if (!e.note.empty()) s += " " + e.note;
  for (char& c : s)
    if (c == ',') c = ';';
  return s;
}

namespace {

struct TrajectoryRow {
  std::size_t index;
  double s, rho;
  std::string region_a, region_b;
  StateV v;
  Vec pa, pb;
  std::string kind;
};

std::vector<TrajectoryRow> trajectory_rows(const BimatrixGame& game, const Trajectory& traj) {
  std::vector<TrajectoryRow> rows;
  auto add = [&](std::size_t idx, double s, double rho, const Segment* seg, const StateV& v, const std::string& kind) {
    TrajectoryRow r{idx, s, rho, seg ? play_label(seg->play_a) : "", seg ? play_label(seg->play_b) : "", v,
                    Vec(game.n(), std::nan("")), Vec(game.n(), std::nan("")), kind};
    try {
      const StateP p = p_from_v(game, v);
      r.pa = p.pA.components();
      r.pb = p.pB.components();
    } catch (const Error&) {
    }
    rows.push_back(std::move(r));
  };
  // row 0 is the initial state labelled with the first segment's plays; row k
  // is the end of segment k labelled with the plays that led there
  const StateV v0 = utilities(game, traj.initial);
  add(0, 0.0, 0.0, traj.segments.empty() ? nullptr : &traj.segments.front(), v0, "Start");
  double s = 0.0, rho = 0.0;
  for (std::size_t k = 0; k < traj.segments.size(); ++k) {
    const Segment& seg = traj.segments[k];
    s += seg.duration_s;
    rho += s_to_rho(seg.duration_s);
    add(k + 1, s, rho, &seg, seg.end, event_label(seg.end_event));
  }
  if (traj.segments.empty() || traj.stop.kind != traj.segments.back().end_event.kind ||
      traj.stop.note != traj.segments.back().end_event.note) {
    const StateV& v = traj.segments.empty() ? v0 : traj.segments.back().end;
    add(traj.segments.size() + 1, s, rho, nullptr, v, event_label(traj.stop));
  }
  return rows;
}

}  // namespace

std::string trajectory_csv(const BimatrixGame& game, const Trajectory& traj) {
  std::ostringstream out;
  out << kTrajectoryHeader << '\n';
  for (const auto& r : trajectory_rows(game, traj)) {
    out << r.index << ',' << fmt(r.s) << ',' << fmt(r.rho) << ',' << r.region_a << ',' << r.region_b;
    for (const Vec* v : {&r.v.vA, &r.v.vB, &r.pa, &r.pb})
      for (double x : *v) out << ',' << fmt(x);
    out << ',' << r.kind << '\n';
  }
  return out.str();
}

std::string trajectory_json(const BimatrixGame& game, const Trajectory& traj) {
  // numbers are written through fmt, so the text is assembled by hand
  auto arr = [](const Vec& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (std::isfinite(v[i]) ? fmt(v[i]) : "null");
    return s + "]";
  };
  std::ostringstream out;
  out << '[';
  bool first = true;
  for (const auto& r : trajectory_rows(game, traj)) {
    if (!first) out << ',';
    first = false;
    out << "{\"event_index\":" << r.index << ",\"s_cum\":" << fmt(r.s) << ",\"rho_cum\":"
        << (std::isfinite(r.rho) ? fmt(r.rho) : "null") << ",\"regionA\":" << json(r.region_a).dump()
        << ",\"regionB\":" << json(r.region_b).dump() << ",\"vA\":" << arr(r.v.vA) << ",\"vB\":" << arr(r.v.vB)
        << ",\"pA\":" << arr(r.pa) << ",\"pB\":" << arr(r.pb) << ",\"event_kind\":" << json(r.kind).dump() << '}';
  }
  out << ']';
  return out.str();
}

std::string itinerary_json(const std::vector<ItineraryEntry>& it) {
  // numbers go through fmt so that output is stable at 12 significant digits
  std::ostringstream out;
  out << '[';
  for (std::size_t k = 0; k < it.size(); ++k) {
    const auto& e = it[k];
    if (k) out << ',';
    std::string a, b;
    if (e.region) {
      a = std::to_string(e.region->a + 1);
      b = std::to_string(e.region->b + 1);
    } else if (e.leg) {
      a = '"' + std::to_string(e.leg->pair_a.first + 1) + "+" + std::to_string(e.leg->pair_a.second + 1) + '"';
      b = '"' + std::to_string(e.leg->pair_b.first + 1) + "+" + std::to_string(e.leg->pair_b.second + 1) + '"';
    }
    out << "{\"A\":" << a << ",\"B\":" << b << ",\"duration_s\":" << fmt(e.duration_s)
        << ",\"duration_rho\":" << (std::isfinite(e.duration_rho) ? fmt(e.duration_rho) : "null") << '}';
  }
  out << ']';
  return out.str();
}

std::string diagram_json(const TransitionDiagram& d) {
  json j;
  j["regime"] = to_string(d.regime);
  json arcs = json::array();
  for (const auto& a : d.arcs) arcs.push_back({to_string(a.from), to_string(a.to)});
  j["arcs"] = arcs;
  json corners = json::array();
  for (const auto& a : d.corner_crossings) corners.push_back({to_string(a.from), to_string(a.to)});
  j["corner_crossings"] = corners;
  json faces = json::array();
  for (const auto& a : d.ambiguous_faces) faces.push_back({to_string(a.from), to_string(a.to)});
  j["ambiguous_faces"] = faces;
  json types = json::array();
  for (const auto& [k, t] : d.corners)
    types.push_back({{"A", to_string(k.first)}, {"B", to_string(k.second)},
                     {"type", t == CornerType::Spiral ? "spiral" : "transversal"}});
  j["corner_types"] = types;
  j["degenerate_exits"] = d.degenerate_exits;
  return j.dump();
}

std::string attraction_json(const AttractionReport& r) {
  auto num = [](double x) { return json::parse(fmt(std::isfinite(x) ? x : -1.0)); };
  auto vec = [&](const Vec& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
  };
  json j;
  j["beta"] = num(r.beta);
  j["fixed_point"] = {{"section", "S1"},
                      {"z", vec(r.first.fixed_point)},
                      {"vA", vec(r.first.fixed_state.vA)},
                      {"vB", vec(r.first.fixed_state.vB)},
                      {"fit_residual", num(r.first.residual)}};
  j["n_starts"] = r.n_starts;
  j["horizon"] = r.horizon;
  j["converged_fraction"] = num(r.converged_fraction);
  j["worst_distance"] = num(r.worst_distance);
  json out = json::array();
  for (const auto& o : r.outliers) {
    json e{{"index", o.index}, {"reason", o.reason}};
    e["distance"] = std::isfinite(o.distance) ? num(o.distance) : json(nullptr);
    out.push_back(e);
  }
  j["outliers"] = out;
  return j.dump();
}

ScanRow scan_point(double beta) {
  ScanRow row;
  row.beta = beta;
  const double s = golden_mean();
  if (beta == s) return row;
  try {
    const PeriodicOrbitSpec o = beta < s ? clockwise_orbit(beta) : anticlockwise_orbit(beta);
    row.kind = to_string(o.kind);
    row.exists = true;
    row.n = o.section_n;
    row.m = o.section_m;
    row.t1 = o.t1;
    row.t2 = o.t2;
    row.diameter = o.diameter;
    const StabilityReport rep = stability_matrix(beta);
    row.eigenvalues = rep.eigenvalues;
    row.classification = to_string(rep.classification);
  } catch (const ExistenceError&) {
    row.kind = "none";
  }
  return row;
}

std::string scan_csv_row(const ScanRow& r) {
  std::ostringstream out;
  out << fmt(r.beta) << ',' << r.kind << ',' << (r.exists ? "true" : "false");
  if (r.exists) {
    for (double x : r.n) out << ',' << fmt(x);
    for (double x : r.m) out << ',' << fmt(x);
    out << ',' << fmt(r.t1) << ',' << fmt(r.t2) << ',' << fmt(r.diameter);
    for (const auto& l : r.eigenvalues) out << ',' << fmt(l.real()) << ',' << fmt(l.imag());
  } else {
    for (int k = 0; k < 15; ++k) out << ',';
  }
  out << ',' << r.classification;
  return out.str();
}

}  // namespace fpdyn
