#include "qattract/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qattract/attract.hpp"
#include "qattract/basin.hpp"
#include "qattract/invariants.hpp"
#include "qattract/io.hpp"
#include "qattract/svg.hpp"

namespace qattract {

namespace fs = std::filesystem;

namespace {

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::WrongNonlinearity:
    case ErrorCode::MissingEvent: return 1;
    default: return 2;
  }
}

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<double> gamma;
  std::optional<int> p;
  int workers = 0;
};

struct Run {
  std::string command;
  std::vector<std::string> args;
  Common common;
  std::vector<std::string> files;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path path(const std::string& name) const { return fs::path(common.out) / name; }
  void write(const std::string& name, const std::string& text) {
    write_text(path(name), text);
    files.push_back(name);
  }
  void write(const std::string& name, const Json& j) {
    write_json(path(name), j);
    files.push_back(name);
  }
  void manifest(int code) {
    Json m;
    m["command"] = command;
    m["config"] = common.config;
    m["out"] = common.out;
    Json ov = Json::object();
    if (common.gamma) ov["gamma"] = *common.gamma;
    if (common.p) ov["p"] = *common.p;
    m["overrides"] = ov;
    m["argv"] = args;
    m["version"] = QATTRACT_VERSION;
    m["exit_code"] = code;
    m["files"] = files;
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(path("manifest.json"), m);
  }
};

SystemFile load(const Common& c) {
  if (c.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
  SystemFile sf = load_system(c.config);
  if (c.p) {
    const Nonlinearity& g = sf.cfg.g();
    Nonlinearity ng = g;
    if (g.kind() == Nonlinearity::Kind::OddMonomial) ng = Nonlinearity::odd_monomial(*c.p);
    else if (g.kind() == Nonlinearity::Kind::EvenMonomial) ng = Nonlinearity::even_monomial(*c.p);
    else throw Error(ErrorCode::ConfigError, "--p needs a monomial nonlinearity");
    sf.cfg = SystemConfig(sf.cfg.forcing(), sf.cfg.freq(), ng, sf.cfg.gamma());
  }
  if (c.gamma) sf.cfg = sf.cfg.with_gamma(*c.gamma);
  return sf;
}

double alpha_of(const SystemConfig& cfg) { return equilibrium_c0(cfg.g(), cfg.forcing().mean()); }

LevelSetS make_S(const SystemConfig& cfg, const FourierSolution& sol) {
  if (cfg.g().kind() != Nonlinearity::Kind::OddMonomial)
    throw Error(ErrorCode::WrongNonlinearity, "this set needs kind = odd");
  const double alpha = alpha_of(cfg);
  const RBounds rb = estimate_R_bounds(cfg.g(), sol, alpha);
  const FrictionBound fb = estimate_friction_bound(cfg.gamma(), cfg.g(), sol, alpha);
  return build_S(cfg.gamma(), cfg.g(), sol, alpha, rb, fb);
}

std::string polyline_csv(const std::vector<Vec2>& pts, const std::string& header) {
  std::string out = header + "\n";
  for (Vec2 p : pts) out += fmt17(p.x) + "," + fmt17(p.y) + "\n";
  return out;
}

void print_report(std::ostream& out, const Report& r) {
  out << r.check << ": " << (r.pass ? "pass" : "FAIL") << " (samples " << r.samples << ", violations " << r.violations
      << ", worst " << r.worst_margin << ")";
  if (!r.note.empty()) out << " " << r.note;
  out << "\n";
}

int cmd_solve(Run& run, std::ostream& out) {
  const SystemFile sf = load(run.common);
  const FourierSolution sol = harmonic_balance_auto(sf.cfg);
  run.write("solution.csv", solution_csv(sol));
  run.write("solution.json", solution_summary(sf.cfg, sol));
  out << "mean " << fmt17(sol.mean()) << " residual " << sol.residual_norm << " N " << sol.lattice.truncation() << "\n";
  return 0;
}

int cmd_verify(Run& run, const std::string& set, std::optional<double> X0_flag, std::ostream& out) {
  const SystemFile sf = load(run.common);
  const SystemConfig& cfg = sf.cfg;
  std::vector<Report> reports;

  if (set == "hexagon" || set == "blowup") {
    if (cfg.g().kind() != Nonlinearity::Kind::EvenMonomial)
      throw Error(ErrorCode::WrongNonlinearity, "--set " + set + " needs kind = even");
    const int p = cfg.g().p();
    const ForcingBounds b = compute_forcing_bounds(cfg.forcing(), p);
    const FluxFields fields{&cfg, b, 100};
    if (set == "hexagon") {
      const HexagonA A = build_hexagon(p, b.f_pow, b.F_pow, cfg.gamma());
      const RegionSpec R = A.region();
      reports.push_back(verify_inward_flux(R, cfg.g(), cfg.gamma(), fields, 1000));
      reports.back().param("lambda1", A.lambda1);
      reports.back().param("lambda2", A.lambda2);
      run.write("region.json", region_json(R));
      run.write("region.csv", region_csv(R));
    } else {
      const std::optional<double> X0 = X0_flag ? X0_flag : sf.X0;
      if (!X0) throw Error(ErrorCode::ConfigError, "--set blowup needs X0 (flag --X0 or [params] X0)");
      const BlowupRegion B = build_blowup_region(p, b.f_pow, b.F_pow, cfg.gamma(), *X0);
      const RegionSpec S = B.S_region();
      const RegionSpec J = B.J_region();
      reports.push_back(verify_inward_flux(J, cfg.g(), cfg.gamma(), fields, 1000));
      reports.push_back(verify_inward_flux(S, cfg.g(), cfg.gamma(), fields, 1000));
      reports.back().param("xi", B.xi_root);
      reports.back().param("b", B.b);
      run.write("region.json", region_json(S));
      run.write("region.csv", region_csv(S));
      run.write("region_J.json", region_json(J));
      run.write("region_J.csv", region_csv(J));
    }
  } else if (set == "S" || set == "sandwich" || set == "quadrants") {
    const FourierSolution sol = harmonic_balance_auto(cfg);
    const LevelSetS S = make_S(cfg, sol);
    if (set == "S") {
      reports.push_back(verify_S_flux(S, sol));
      run.write("S_boundary.csv", polyline_csv(S.boundary, "xi,y"));
    } else if (set == "sandwich") {
      reports.push_back(verify_sandwich(cfg, sol, &S, 10.0 * S.xi_intercept));
    } else {
      std::vector<ErrorState> ics;
      for (double r : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        ics.push_back({0.5 * r, 3.0 * r, 0.0});
        ics.push_back({0.1 * r, 10.0 * r, 0.0});
        ics.push_back({-0.5 * r, -3.0 * r, 0.0});
        ics.push_back({-0.1 * r, -10.0 * r, 0.0});
      }
      reports.push_back(quadrant_transit_check(cfg, sol, ics));
    }
  } else {
    throw Error(ErrorCode::ConfigError, "--set must be hexagon, S, blowup, sandwich or quadrants");
  }

  bool pass = true;
  Json arr = Json::array();
  for (const Report& r : reports) {
    print_report(out, r);
    arr.push_back(report_json(r));
    pass = pass && r.pass;
  }
  run.write("report.json", reports.size() == 1 ? arr[0] : arr);
  return pass ? 0 : 2;
}

int cmd_basin(Run& run, const std::string& grid_text, double tmax, double phase, std::ostream& out) {
  const SystemFile sf = load(run.common);
  GridSpec grid = parse_grid(grid_text);
  grid.t_phase = phase;
  const FourierSolution sol = harmonic_balance_auto(sf.cfg);
  BasinBudget budget;
  budget.t_max = tmax;
  const BasinMap map = sweep(sf.cfg, sol, grid, budget, run.common.workers);
  run.write("basin.csv", basin_csv(map));
  run.write("basin_matrix.txt", basin_matrix(map));
  out << "attracted " << map.count(Label::Attracted) << " blown_up " << map.count(Label::BlownUp) << " undecided "
      << map.count(Label::Undecided) << "\n";
  return 0;
}

int cmd_simulate(Run& run, double x0, double y0, double t0, double tmax, double dt, std::ostream& out) {
  const SystemFile sf = load(run.common);
  IntegratorSettings set;
  set.t_max = t0 + tmax;
  set.sample_interval = dt;
  const std::vector<EventSpec> events = {EventSpec::cross_y_axis(Direction::Any, "x=0"),
                                         EventSpec::cross_x_axis(Direction::Any, "y=0")};
  const Trajectory tr = integrate(sf.cfg, {x0, y0, t0}, set, events);
  run.write("trajectory.csv", trajectory_csv(tr));
  run.write("events.csv", events_csv(tr));
  const PhaseState last = tr.final_state();
  out << "outcome " << to_string(tr.outcome) << " t " << fmt17(tr.t_end) << " x " << fmt17(last.x) << " y "
      << fmt17(last.y) << "\n";
  return tr.outcome == Outcome::Completed ? 0 : 2;
}

int cmd_plot(Run& run, const std::vector<std::string>& regions, const std::vector<std::string>& trajs,
             const std::string& basin, const std::string& title, std::ostream& out) {
  if (regions.empty() && trajs.empty() && basin.empty())
    throw Error(ErrorCode::ConfigError, "plot needs at least one of --region, --trajectory, --basin");
  static const char* palette[] = {"#1b3f8b", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#2c3e50"};
  SvgPlot plot;
  plot.set_title(title);
  if (!basin.empty()) plot.add_basin(basin_from_csv(read_text(basin)));
  std::size_t k = 0;
  for (const std::string& r : regions) {
    Json j;
    try {
      j = Json::parse(read_text(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ConfigError, r + ": " + e.what());
    }
    const RegionSpec R = region_from_json(j);
    plot.add_region(R, palette[k++ % 6], R.kind);
  }
  for (const std::string& t : trajs) {
    std::vector<Vec2> pts;
    for (const PhaseState& s : trajectory_from_csv(read_text(t))) pts.push_back({s.x, s.y});
    if (pts.empty()) throw Error(ErrorCode::ConfigError, t + ": no samples");
    plot.add_curve(std::move(pts), palette[k++ % 6], fs::path(t).stem().string());
  }
  run.write("plot.svg", plot.render());
  out << "wrote " << run.path("plot.svg").string() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-periodic attractors of forced dissipative oscillators"};
  app.set_version_flag("--version", std::string(QATTRACT_VERSION));
  app.require_subcommand(1);

  Run run;
  run.args = args;
  Common& c = run.common;
  auto add_common = [&c](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", c.config, "system file");
    if (needs_config) opt->required();
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--gamma", c.gamma, "override gamma");
    sub->add_option("--p", c.p, "override the monomial exponent p");
    sub->add_option("--workers", c.workers, "worker threads (0: all cores)");
  };

  auto* solve = app.add_subcommand("solve", "harmonic-balance solve");
  add_common(solve, true);

  std::string set;
  std::optional<double> X0;
  auto* verify = app.add_subcommand("verify", "certify one set by sampled flux");
  add_common(verify, true);
  verify->add_option("--set", set, "hexagon | S | blowup | sandwich | quadrants")->required();
  verify->add_option("--X0", X0, "blow-up window edge");

  std::string grid;
  double tmax = 200.0;
  double phase = 0.0;
  auto* basin = app.add_subcommand("basin", "classify a grid of initial conditions");
  add_common(basin, true);
  basin->add_option("--grid", grid, "x0:x1:nx,y0:y1:ny")->required();
  basin->add_option("--tmax", tmax, "time budget per point")->capture_default_str();
  basin->add_option("--phase", phase, "initial time of every run")->capture_default_str();

  double sx = 0.0, sy = 0.0, st = 0.0, sdt = 0.0;
  double stmax = 100.0;
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(simulate, true);
  simulate->add_option("--x0", sx, "initial x")->required();
  simulate->add_option("--y0", sy, "initial y")->required();
  simulate->add_option("--t0", st, "initial time")->capture_default_str();
  simulate->add_option("--tmax", stmax, "integration length")->capture_default_str();
  simulate->add_option("--dt", sdt, "sample interval (0: every step)")->capture_default_str();

  std::vector<std::string> regions, trajs;
  std::string basin_file, title;
  auto* plot = app.add_subcommand("plot", "overlay regions, trajectories and a basin into one SVG");
  add_common(plot, false);
  plot->add_option("--region", regions, "region JSON")->check(CLI::ExistingFile);
  plot->add_option("--trajectory", trajs, "trajectory CSV")->check(CLI::ExistingFile);
  plot->add_option("--basin", basin_file, "basin CSV")->check(CLI::ExistingFile);
  plot->add_option("--title", title, "figure title");

  std::string manifest_path;
  std::string rerun_out;
  auto* rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
  rerun->add_option("--manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
  rerun->add_option("--out", rerun_out, "new output directory (default: the recorded one)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << QATTRACT_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (rerun->parsed()) {
      const Json m = Json::parse(read_text(manifest_path));
      std::vector<std::string> again = m.at("argv").get<std::vector<std::string>>();
      if (!rerun_out.empty()) {
        const auto it = std::find(again.begin(), again.end(), "--out");
        if (it != again.end() && it + 1 != again.end()) *(it + 1) = rerun_out;
        else {
          again.push_back("--out");
          again.push_back(rerun_out);
        }
      }
      return run_cli(again, out, err);
    }

    int code = 0;
    try {
      if (solve->parsed()) {
        run.command = "solve";
        code = cmd_solve(run, out);
      } else if (verify->parsed()) {
        run.command = "verify";
        code = cmd_verify(run, set, X0, out);
      } else if (basin->parsed()) {
        run.command = "basin";
        code = cmd_basin(run, grid, tmax, phase, out);
      } else if (simulate->parsed()) {
        run.command = "simulate";
        code = cmd_simulate(run, sx, sy, st, stmax, sdt, out);
      } else if (plot->parsed()) {
        run.command = "plot";
        code = cmd_plot(run, regions, trajs, basin_file, title, out);
      }
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      code = exit_code(e.code());
      if (code == 1) return code;
    }
    run.manifest(code);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace qattract
