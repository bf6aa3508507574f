#include "chdbc/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "chdbc/config.hpp"
#include "chdbc/diagnostics.hpp"
#include "chdbc/init.hpp"
#include "chdbc/io.hpp"
#include "chdbc/solver.hpp"
#include "chdbc/stationary.hpp"

namespace fs = std::filesystem;

namespace chdbc {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Grid grid_of(const RunSpec& spec) { return build_grid(spec.nx, spec.ny, spec.lx, spec.ly); }

SolverParams solver_params(const RunSpec& spec) {
  SolverParams p;
  p.dt = spec.dt;
  p.kappa = spec.kappa;
  p.alpha = spec.alpha;
  p.s_bulk = spec.s_bulk;
  p.s_surf = spec.s_surf;
  p.max_energy_uptick = spec.uptick_tol;
  p.max_halvings = spec.max_halvings;
  return p;
}

State make_initial(const RunSpec& spec, const Grid& g) {
  switch (spec.init) {
    case RunSpec::Init::constant:
      return constant_state(g, spec.value);
    case RunSpec::Init::random:
      return random_state(g, spec.mean, spec.amplitude, spec.seed);
    case RunSpec::Init::file: {
      Snapshot snap = read_snapshot(spec.path);
      if (snap.grid.nx != g.nx || snap.grid.ny != g.ny)
        throw ConfigError("initial.path: snapshot grid " + std::to_string(snap.grid.nx) +
                          "x" + std::to_string(snap.grid.ny) + " does not match config");
      return snap.state;
    }
  }
  throw ConfigError("initial: unreachable");
}

int do_simulate(const RunSpec& spec, const std::string& outdir, bool quiet = false) {
  fs::create_directories(outdir);
  const Grid g = grid_of(spec);
  const Potential F = bulk_potential(spec), G = surf_potential(spec);
  const State s0 = make_initial(spec, g);

  RunOptions opt;
  opt.t_end = s0.time + spec.t_end;
  opt.report_every = spec.report_every;
  opt.snapshot_every = spec.snapshot_every;
  opt.equilibrium_tol = spec.equilibrium_tol;
  const Trajectory tr = run(s0, solver_params(spec), F, G, g, opt);

  write_timeseries(tr, outdir + "/timeseries.csv");
  write_snapshot(tr.final_state, g, outdir + "/final.txt");
  if (!quiet)
    std::cout << "simulate: " << tr.steps_taken << " steps, energy "
              << num(tr.reports.front().e_total) << " -> "
              << num(tr.reports.back().e_total)
              << (tr.reached_equilibrium ? " (equilibrium)" : "") << ", output in "
              << outdir << "\n";
  return 0;
}

int do_stationary(const RunSpec& spec, const std::string& outdir) {
  fs::create_directories(outdir);
  const Grid g = grid_of(spec);
  const Potential F = bulk_potential(spec), G = surf_potential(spec);
  const State s0 = make_initial(spec, g);

  const TraceField tb = trace(s0.phi, g, Circle::bottom), tt = trace(s0.phi, g, Circle::top);
  const double m_bulk = bulk_mean(s0.phi, g);
  const double m_surf = surface_mean_total(tb, tt, g);

  StationaryParams sp;
  sp.kappa = spec.kappa;
  sp.tol = spec.stationary_tol;
  sp.pseudo_dt = spec.dt;
  sp.s_bulk = spec.s_bulk;
  sp.s_surf = spec.s_surf;
  const StationaryResult res = solve_stationary(s0, m_bulk, m_surf, F, G, sp, g);

  const auto [mv1, mv2] = multipliers(res.state, F, G, spec.kappa, g);
  const MassSystemMultipliers ms = multipliers_from_mass_system(res.state, F, G, spec.kappa, g);
  const TraceField eb = trace(res.state.phi, g, Circle::bottom),
                   et = trace(res.state.phi, g, Circle::top);

  std::ofstream rep(outdir + "/stationary.txt");
  rep << "stationary report\n";
  rep << "verdict            " << (res.converged ? "converged" : "stalled") << "\n";
  rep << "newton_iterations  " << res.iterations << "\n";
  rep << "pseudo_steps       " << res.pseudo_steps << "\n";
  rep << "lambda1            " << num(res.lambda1) << "\n";
  rep << "lambda2            " << num(res.lambda2) << "\n";
  rep << "residual_bulk      " << num(res.residual_bulk) << "\n";
  rep << "residual_surf      " << num(res.residual_surf) << "\n";
  rep << "mass_bulk          " << num(bulk_mean(res.state.phi, g)) << "\n";
  rep << "mass_surf          " << num(surface_mean_total(eb, et, g)) << "\n";
  rep << "meanvalue_lambda1  " << num(mv1) << "\n";
  rep << "meanvalue_lambda2  " << num(mv2) << "\n";
  if (ms.degenerate)
    rep << "mass_system        degenerate, compatibility_gap " << num(ms.compatibility_gap)
        << "\n";
  else
    rep << "mass_system        lambda1 " << num(ms.lambda1) << ", lambda2 "
        << num(ms.lambda2) << "\n";
  rep.close();
  write_snapshot(res.state, g, outdir + "/equilibrium.txt");

  std::cout << "stationary: " << (res.converged ? "converged" : "STALLED") << ", lambda1 "
            << num(res.lambda1) << ", lambda2 " << num(res.lambda2) << ", report in "
            << outdir << "\n";
  return res.converged ? 0 : 1;
}

int do_sweep(const RunSpec& spec, const std::string& outdir) {
  if (!spec.has_sweep) throw ConfigError("sweep: config has no [sweep] section");
  fs::create_directories(outdir);
  std::vector<std::thread> workers;
  std::vector<std::string> errors(spec.sweep_values.size());
  for (std::size_t i = 0; i < spec.sweep_values.size(); ++i) {
    const double v = spec.sweep_values[i];
    const RunSpec sub = with_sweep_value(spec, v);
    const std::string dir = outdir + "/" + spec.sweep_parameter + "=" + num(v);
    workers.emplace_back([sub, dir, &err = errors[i]]() {
      try {
        do_simulate(sub, dir, true);
      } catch (const std::exception& e) {
        err = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();
  int failures = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const std::string dir =
        spec.sweep_parameter + "=" + num(spec.sweep_values[i]);
    if (errors[i].empty()) {
      std::cout << "sweep: " << dir << " done\n";
    } else {
      std::cout << "sweep: " << dir << " FAILED: " << errors[i] << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

struct CheckRow {
  std::string name;
  bool pass;
  std::string detail;
};

int do_verify() {
  std::vector<CheckRow> rows;
  const Potential F = potential_by_name("quartic"), G = potential_by_name("quartic");

  for (const double kappa : {0.01, 0.1, 1.0}) {
    const EllipticConvergence ec = manufactured_elliptic_test({16, 32, 64}, kappa);
    double omin = 1e300;
    for (const double o : ec.order_phi) omin = std::min(omin, o);
    for (const double o : ec.order_psi) omin = std::min(omin, o);
    rows.push_back({"elliptic order, kappa=" + num(kappa), omin >= 1.8,
                    "min observed order " + num(omin)});
  }

  {
    std::vector<double> t, gp, ge;
    for (int i = 0; i <= 200; ++i) {
      const double ti = 0.05 * i;
      t.push_back(ti);
      gp.push_back(std::pow(1.0 + ti, -2.0));
      ge.push_back(std::exp(-3.0 * ti));
    }
    const RateFit fp = fit_decay_rate(t, gp);
    const RateFit fe = fit_decay_rate(t, ge);
    const bool ok = fp.decaying && fp.model == RateFit::Model::power &&
                    std::abs(fp.exponent - 2.0) < 1e-6 && fe.decaying &&
                    fe.model == RateFit::Model::exponential &&
                    std::abs(fe.rate - 3.0) < 1e-6;
    rows.push_back({"rate fitter on synthetic data", ok,
                    "power exponent " + num(fp.exponent) + ", exp rate " + num(fe.rate)});
  }

  {
    const Grid g = build_grid(8, 8, 1.0, 1.0);
    double worst = 0.0;
    for (const double kappa : {0.0, 0.1})
      for (const double alpha : {0.0, 0.1})
        for (int seed = 1; seed <= 3; ++seed) {
          SolverParams p;
          p.dt = 1e-3;
          p.kappa = kappa;
          p.alpha = alpha;
          State a = random_state(g, 0.0, 0.5, static_cast<std::uint64_t>(seed));
          State b = a;
          step(a, p, F, G, g);
          const State d = dense_reference_step(b, p, F, G, g);
          double diff = 0.0, scale = 1.0;
          for (std::size_t idx = 0; idx < a.phi.v.size(); ++idx) {
            diff = std::max(diff, std::abs(a.phi.v[idx] - d.phi.v[idx]));
            scale = std::max(scale, std::abs(d.phi.v[idx]));
          }
          worst = std::max(worst, diff / scale);
        }
    rows.push_back({"spectral vs dense reference step", worst <= 1e-9,
                    "max relative difference " + num(worst)});
  }

  {
    const Grid g = build_grid(32, 32, 1.0, 1.0);
    SolverParams p;
    p.dt = 1e-4;
    const State s0 = random_state(g, 0.1, 0.05, 7);
    RunOptions opt;
    opt.t_end = 200 * p.dt;
    const Trajectory tr = run(s0, p, F, G, g, opt);
    const ConservationReport cons = check_conservation(tr, 1e-12);
    const EnergyLawReport law = check_energy_law(tr, p.max_energy_uptick);
    rows.push_back({"mass conservation, 200 steps", cons.pass,
                    "max drift " +
                        num(std::max({cons.drift_bulk, cons.drift_bot, cons.drift_top}))});
    rows.push_back({"energy monotone + viscous sign", law.pass,
                    "max relative uptick " + num(law.max_uptick_rel)});
  }

  {
    const Grid g = build_grid(16, 16, 1.0, 1.0);
    const State s = random_state(g, 0.0, 1.0, 42);
    const fs::path tmp = fs::temp_directory_path() / "chdbc_verify_snapshot.txt";
    write_snapshot(s, g, tmp.string());
    const Snapshot back = read_snapshot(tmp.string());
    fs::remove(tmp);
    const bool ok = back.state.phi.v == s.phi.v && back.state.time == s.time;
    rows.push_back({"snapshot round-trip", ok, ok ? "bit-exact" : "MISMATCH"});
  }

  {
    const Grid g = build_grid(32, 32, 1.0, 1.0);
    SolverParams p;
    p.dt = 1e-3;
    State s = constant_state(g, 0.5);
    Stepper st(g, F, G, p);
    double dev = 0.0;
    for (int k = 0; k < 5; ++k) {
      st.step(s);
      for (const double v : s.phi.v) dev = std::max(dev, std::abs(v - 0.5));
    }
    rows.push_back(
        {"constant state is a fixed point", dev <= 1e-12, "max deviation " + num(dev)});
  }

  {
    const Grid g = build_grid(32, 32, 1.0, 1.0);
    StationaryParams sp;
    const StationaryResult res =
        solve_stationary(constant_state(g, 0.5), 0.5, 0.5, F, G, sp, g);
    const bool ok = res.converged && res.iterations == 0 &&
                    std::abs(res.lambda1 + 0.375) <= 1e-10 &&
                    std::abs(res.lambda2 - 0.125) <= 1e-10;
    rows.push_back({"trivial equilibrium multipliers", ok,
                    "lambda1 " + num(res.lambda1) + ", lambda2 " + num(res.lambda2)});
  }

  bool all = true;
  std::size_t width = 0;
  for (const CheckRow& r : rows) width = std::max(width, r.name.size());
  for (const CheckRow& r : rows) {
    all = all && r.pass;
    std::cout << (r.pass ? "  PASS  " : "  FAIL  ") << r.name
              << std::string(width - r.name.size() + 2, ' ') << r.detail << "\n";
  }
  std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"coupled bulk/surface Cahn-Hilliard simulator"};
  app.require_subcommand(1);

  std::string config, outdir = "out";
  CLI::App* sim = app.add_subcommand("simulate", "integrate a configured run");
  sim->add_option("config", config, "config file")->required();
  sim->add_option("-o,--output", outdir, "output directory");
  CLI::App* sta = app.add_subcommand("stationary", "solve for an equilibrium");
  sta->add_option("config", config, "config file")->required();
  sta->add_option("-o,--output", outdir, "output directory");
  CLI::App* ver = app.add_subcommand("verify", "run the built-in oracle suite");
  CLI::App* swp = app.add_subcommand("sweep", "run a parameter sweep");
  swp->add_option("config", config, "config file")->required();
  swp->add_option("-o,--output", outdir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return do_simulate(load_config(config), outdir);
    if (sta->parsed()) return do_stationary(load_config(config), outdir);
    if (ver->parsed()) return do_verify();
    if (swp->parsed()) return do_sweep(load_config(config), outdir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace chdbc
