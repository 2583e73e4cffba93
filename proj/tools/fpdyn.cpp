#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "fpdyn/errors.hpp"
#include "fpdyn/invariants.hpp"
#include "fpdyn/io.hpp"
#include "fpdyn/orbits.hpp"
#include "fpdyn/return_map.hpp"
#include "fpdyn/sampling.hpp"
#include "fpdyn/transitions.hpp"

namespace fs = std::filesystem;
using namespace fpdyn;

namespace {

struct Common {
  std::string out;
  std::string format = "csv";
};

// explicit --out first, then FPDYN_OUT, then the working directory
fs::path output_dir(const Common& c) {
  fs::path dir = ".";
  if (const char* env = std::getenv("FPDYN_OUT"); env && *env) dir = env;
  if (!c.out.empty()) dir = c.out;
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ParameterError("cannot write " + p.string());
  f << text;
}

std::string vec_text(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

std::string read_game_text(const std::string& arg) {
  if (fs::exists(arg)) {
    std::ifstream f(arg);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  return arg;  // inline JSON
}

struct SimulateOpts {
  std::optional<double> beta;
  std::string game;
  std::uint64_t seed = 1;
  std::size_t events = 1000;
  double max_time = std::numeric_limits<double>::infinity();
  std::string time_scale = "s";
  std::string policy = "follow_j";
  double eps = 1e-7;
};

int cmd_simulate(const SimulateOpts& o, const Common& c) {
  if (o.beta.has_value() == !o.game.empty()) throw ParameterError("give exactly one of --beta and --game");
  const BimatrixGame game = o.beta ? make_shapley(*o.beta) : parse_game_spec(read_game_text(o.game));
  SimConfig cfg;
  cfg.max_events = o.events;
  cfg.max_time = o.max_time;
  cfg.time_scale = o.time_scale == "rho" ? TimeScale::Rho : TimeScale::S;
  cfg.codim2_policy = o.policy == "abort"     ? Codim2Policy::Abort
                      : o.policy == "perturb" ? Codim2Policy::Perturb
                                              : Codim2Policy::FollowJ;
  cfg.perturb_eps = o.eps;
  Rng rng(o.seed);
  const StateP init = sample_state(rng, game.n());
  const Trajectory tr = simulate(game, init, cfg);
  const auto it = itinerary(tr);
  const fs::path dir = output_dir(c);
  const fs::path traj_path = dir / (c.format == "json" ? "trajectory.json" : "trajectory.csv");
  write_file(traj_path, c.format == "json" ? trajectory_json(game, tr) : trajectory_csv(game, tr));
  write_file(dir / "itinerary.json", itinerary_json(it));

  std::cout << "events: " << tr.segments.size() << "\n"
            << "stop: " << describe(tr.stop) << "\n"
            << "trajectory: " << traj_path.string() << "\n"
            << "itinerary: " << (dir / "itinerary.json").string() << "\n";
  if (game.beta() && game.n() == 3) {
    const TransitionDiagram d = diagram_for(*game.beta());
    const auto bad = validate_itinerary(it, d);
    std::cout << "diagram (" << to_string(d.regime) << "): "
              << (bad ? "violation at index " + std::to_string(*bad) : std::string("valid")) << "\n";
    std::cout << "tail matches Shapley pattern: " << (pattern_match(it, shapley_pattern(), 5) ? "yes" : "no") << "\n"
              << "tail matches anti-Shapley pattern: " << (pattern_match(it, anti_shapley_pattern(), 5) ? "yes" : "no")
              << "\n";
  }
  std::cout << "itinerary tail:";
  for (std::size_t k = it.size() > 12 ? it.size() - 12 : 0; k < it.size(); ++k) {
    if (it[k].region)
      std::cout << " (" << to_string(*it[k].region) << ")";
    else if (it[k].leg)
      std::cout << " [" << to_string(*it[k].leg) << "]";
  }
  std::cout << "\n";
  return 0;
}

int cmd_orbit(const std::string& kind, double beta, const Common& c) {
  PeriodicOrbitSpec o;
  std::optional<JOrbitSpec> j;
  if (kind == "clockwise") {
    o = clockwise_orbit(beta);
  } else if (kind == "anticlockwise") {
    o = anticlockwise_orbit(beta);
  } else {
    j = j_orbit(beta);
    o = j->orbit;
  }
  const char* root_name = kind == "clockwise" ? "nu" : kind == "anticlockwise" ? "mu" : "X*";
  if (c.format == "json") {
    std::ostringstream s;
    auto arr = [](const Vec& v) {
      std::string t = "[";
      for (std::size_t i = 0; i < v.size(); ++i) t += (i ? "," : "") + fmt(v[i]);
      return t + "]";
    };
    s << "{\"kind\":\"" << to_string(o.kind) << "\",\"beta\":" << fmt(beta) << ",\"root\":" << fmt(o.root)
      << ",\"n\":" << arr(o.section_n) << ",\"m\":" << arr(o.section_m) << ",\"t1\":" << fmt(o.t1)
      << ",\"t2\":" << fmt(o.t2) << ",\"diameter\":" << fmt(o.diameter)
      << ",\"closure_residual\":" << fmt(o.closure_residual);
    if (j) s << ",\"ratio_b\":" << fmt(j->ratio_b) << ",\"ratio_a\":" << fmt(j->ratio_a);
    s << "}";
    std::cout << s.str() << "\n";
    return 0;
  }
  std::cout << "orbit: " << to_string(o.kind) << " at beta " << fmt(beta) << "\n"
            << root_name << " = " << fmt(o.root) << "\n"
            << "n = " << vec_text(o.section_n) << "\n"
            << "m = " << vec_text(o.section_m) << "\n"
            << "(t1, t2) = (" << fmt(o.t1) << ", " << fmt(o.t2) << ")\n"
            << "diameter = " << fmt(o.diameter) << "\n"
            << "closure residual = " << fmt(o.closure_residual) << "\n";
  if (j)
    std::cout << "diameter ratios = (" << fmt(j->ratio_b) << ", " << fmt(j->ratio_a) << ")\n"
              << "ratios from n1 = (" << fmt(j->ratio_b_from_n1) << ", " << fmt(j->ratio_a_from_n1) << ")\n";
  return 0;
}

int cmd_stability(double beta) {
  const StabilityReport r = stability_matrix(beta);
  std::cout << "orbit: " << to_string(r.kind) << " at beta " << fmt(beta) << (r.numerical ? " (finite differences)" : "")
            << "\nmatrix:\n";
  for (std::size_t i = 0; i < 3; ++i) std::cout << "  " << vec_text(r.matrix.row(i)) << "\n";
  std::cout << "eigenvalues:\n";
  for (const auto& l : r.eigenvalues) std::cout << "  " << fmt(l.real()) << (l.imag() < 0 ? " - " : " + ") << fmt(std::abs(l.imag())) << "i\n";
  std::cout << "classification: " << to_string(r.classification) << "\n";
  return 0;
}

int cmd_scan(double from, double to, int steps, const Common& c) {
  if (steps < 1) throw ParameterError("--steps must be at least 1");
  std::vector<double> grid;
  for (int k = 0; k <= steps; ++k) grid.push_back(from + (to - from) * k / steps);
  for (double b : grid)
    if (!(b > -1.0 && b <= 1.0)) throw ParameterError("scan grid leaves (-1, 1]");
  std::vector<ScanRow> rows(grid.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < grid.size(); start += workers) {
    std::vector<std::future<ScanRow>> batch;
    for (std::size_t k = start; k < std::min(grid.size(), start + workers); ++k)
      batch.push_back(std::async(std::launch::async, scan_point, grid[k]));
    for (std::size_t k = 0; k < batch.size(); ++k) rows[start + k] = batch[k].get();
  }
  std::string text = std::string(kScanHeader) + "\n";
  for (const auto& r : rows) text += scan_csv_row(r) + "\n";
  const fs::path p = output_dir(c) / "scan.csv";
  write_file(p, text);
  std::cout << "scan: " << rows.size() << " rows written to " << p.string() << "\n";
  return 0;
}

int cmd_taufind(double lo, double hi, double tol) {
  const TauResult t = find_tau(lo, hi, tol);
  std::cout << "tau = " << fmt(t.tau) << "\n"
            << "min real eigenvalue + 1 at tau = " << fmt(t.g) << "\n"
            << "bisection steps = " << t.iterations << "\n";
  return 0;
}

int cmd_sigma_check(int steps, const Common& c) {
  if (steps < 2) throw ParameterError("--steps must be at least 2");
  std::string text = "beta,residual\n";
  double best = INFINITY, best_beta = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double b = -1.0 + 2.0 * (k + 1) / (steps + 1.0);
    const double r = zero_sum_certificate(b);
    text += fmt(b) + "," + fmt(r) + "\n";
    if (r < best) {
      best = r;
      best_beta = b;
    }
  }
  const double s = golden_mean();
  text += fmt(s) + "," + fmt(zero_sum_certificate(s)) + "\n";
  const fs::path p = output_dir(c) / "sigma_check.csv";
  write_file(p, text);
  std::cout << "sigma = " << fmt(s) << "\n"
            << "residual at sigma = " << fmt(zero_sum_certificate(s)) << "\n"
            << "smallest grid residual " << fmt(best) << " at beta " << fmt(best_beta) << "\n"
            << "curve: " << p.string() << "\n";
  return 0;
}

int cmd_check(bool serial) {
  const auto results = run_invariant_suite(!serial);
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.module << ": " << r.name << " [" << fmt(r.seconds) << " s] "
              << r.detail << "\n";
    failed += r.passed ? 0 : 1;
  }
  std::cout << results.size() - failed << "/" << results.size() << " invariant checks passed\n";
  return failed ? 4 : 0;
}

int cmd_diagram(double beta) {
  std::cout << diagram_json(diagram_for(beta)) << "\n";
  return 0;
}

int cmd_attraction(double beta, std::size_t starts, std::size_t horizon, std::uint64_t seed, const Common& c) {
  const AttractionReport r = attraction_check(beta, starts, horizon, seed);
  const fs::path p = output_dir(c) / "attraction.json";
  write_file(p, attraction_json(r));
  std::cout << "converged fraction: " << fmt(r.converged_fraction) << "\n"
            << "worst section distance: " << fmt(r.worst_distance) << "\n"
            << "outliers: " << r.outliers.size() << "\n"
            << "report: " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time fictitious play in the Shapley family of 3x3 games"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out, "output directory (overrides FPDYN_OUT)");
  app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"csv", "json"}));

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "simulate one trajectory from a seeded random start");
  sim->add_option("--beta", so.beta, "Shapley parameter in (-1, 1]");
  sim->add_option("--game", so.game, "game spec JSON (file path or inline)");
  sim->add_option("--seed", so.seed, "random seed");
  sim->add_option("--events", so.events, "maximum number of events")->check(CLI::PositiveNumber);
  sim->add_option("--max-time", so.max_time, "time horizon");
  sim->add_option("--time-scale", so.time_scale, "units of --max-time")->check(CLI::IsMember({"s", "rho"}));
  sim->add_option("--policy", so.policy, "codimension-two policy")
      ->check(CLI::IsMember({"follow_j", "abort", "perturb"}));
  sim->add_option("--eps", so.eps, "perturbation size for --policy perturb");
  sim->add_option("--out", common.out, "output directory");
  sim->add_option("--format", common.format, "trajectory format")->check(CLI::IsMember({"csv", "json"}));

  std::string kind;
  double beta = 0.0;
  auto* orb = app.add_subcommand("orbit", "construct a periodic orbit");
  orb->add_option("--kind", kind, "orbit kind")->required()->check(CLI::IsMember({"clockwise", "anticlockwise", "j"}));
  orb->add_option("--beta", beta, "Shapley parameter")->required();
  orb->add_option("--format", common.format, "text or json")->check(CLI::IsMember({"csv", "json"}));

  auto* stab = app.add_subcommand("stability", "return-map linearization of the symmetric orbit");
  stab->add_option("--beta", beta, "Shapley parameter")->required();

  double from = 0.0, to = 0.0;
  int steps = 0;
  auto* scan = app.add_subcommand("scan", "orbit data over a beta grid");
  scan->add_option("--beta-from", from)->required();
  scan->add_option("--beta-to", to)->required();
  scan->add_option("--steps", steps)->required();
  scan->add_option("--out", common.out, "output directory");

  double lo = golden_mean() + 0.01, hi = 0.99, tol = 1e-6;
  auto* tau = app.add_subcommand("taufind", "locate the period-doubling parameter");
  tau->add_option("--lo", lo);
  tau->add_option("--hi", hi);
  tau->add_option("--tol", tol);

  int sigma_steps = 400;
  auto* sig = app.add_subcommand("sigma-check", "zero-sum residual curve over beta");
  sig->add_option("--steps", sigma_steps);
  sig->add_option("--out", common.out, "output directory");

  bool serial = false;
  auto* chk = app.add_subcommand("check", "run the invariant suite");
  chk->add_flag("--serial", serial, "run checks one after another");

  auto* dia = app.add_subcommand("diagram", "transition diagram as JSON");
  dia->add_option("--beta", beta, "Shapley parameter")->required();

  std::size_t starts = 500, horizon = 300;
  std::uint64_t seed = 1;
  auto* att = app.add_subcommand("attraction", "global attraction report for beta <= 0");
  att->add_option("--beta", beta, "Shapley parameter")->required();
  att->add_option("--starts", starts);
  att->add_option("--horizon", horizon);
  att->add_option("--seed", seed);
  att->add_option("--out", common.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(so, common);
    if (*orb) return cmd_orbit(kind, beta, common);
    if (*stab) return cmd_stability(beta);
    if (*scan) return cmd_scan(from, to, steps, common);
    if (*tau) return cmd_taufind(lo, hi, tol);
    if (*sig) return cmd_sigma_check(sigma_steps, common);
    if (*chk) return cmd_check(serial);
    if (*dia) return cmd_diagram(beta);
    if (*att) return cmd_attraction(beta, starts, horizon, seed, common);
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const StructuralError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
