#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chdbc/cli.hpp"
#include "chdbc/config.hpp"
#include "chdbc/grid.hpp"
#include "chdbc/init.hpp"
#include "chdbc/io.hpp"
#include "chdbc/potential.hpp"
#include "chdbc/solver.hpp"

using namespace chdbc;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / "chdbc_tests";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"chdbc"};
  owned.insert(owned.end(), args);
  std::vector<char*> argv;
  for (auto& a : owned) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config defaults and full parse") {
  RunSpec d = parse_config("");
  CHECK(d.nx == 64);
  CHECK(d.kappa == 0.1);
  CHECK(d.init == RunSpec::Init::constant);
  CHECK_FALSE(d.has_sweep);

  RunSpec s = parse_config(R"(
# comment
[grid]
nx = 32
ny = 16
lx = 2.0
ly = 1.5

[model]
kappa = 0.05
alpha = 0.1
potential_surf = contact_line
surf_gamma = 0.8
surf_theta = 0.7

[scheme]
dt = 5e-4
t_end = 0.02
report_every = 2

[initial]
type = random
mean = 0.1
amplitude = 0.2
seed = 42

[sweep]
parameter = alpha
values = 0.2 0.1 0.05 0
)");
  CHECK(s.nx == 32);
  CHECK(s.ny == 16);
  CHECK(s.ly == doctest::Approx(1.5));
  CHECK(s.kappa == doctest::Approx(0.05));
  CHECK(s.alpha == doctest::Approx(0.1));
  CHECK(s.potential_surf == "contact_line");
  CHECK(s.surf_gamma == doctest::Approx(0.8));
  CHECK(s.dt == doctest::Approx(5e-4));
  CHECK(s.report_every == 2);
  CHECK(s.seed == 42);
  CHECK(s.init == RunSpec::Init::random);
  CHECK(s.mean == doctest::Approx(0.1));
  REQUIRE(s.has_sweep);
  CHECK(s.sweep_parameter == "alpha");
  REQUIRE(s.sweep_values.size() == 4);
  CHECK(s.sweep_values[3] == 0.0);

  Potential G = surf_potential(s);
  CHECK(G.label == "contact_line");
  Potential F = bulk_potential(s);
  CHECK(F.label == "quartic");

  RunSpec swept = with_sweep_value(s, 0.05);
  CHECK(swept.alpha == doctest::Approx(0.05));
}

TEST_CASE("config errors carry locations and key paths") {
  CHECK_THROWS_WITH_AS(parse_config("[grid]\nnz = 3\n"),
                       doctest::Contains("unknown key 'nz'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[grid]\nnx 32\n"), doctest::Contains("line 2"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[model]\nkappa = -1\n"),
                       doctest::Contains("model.kappa"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[weird]\n"), doctest::Contains("unknown section"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[scheme]\ndt = fast\n"),
                       doctest::Contains("not a number"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[model]\npotential_bulk = contact_line\n"),
                       doctest::Contains("surface-only"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[sweep]\nparameter = nx\nvalues = 1 2\n"),
                       doctest::Contains("sweep.parameter"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[sweep]\nparameter = dt\nvalues = 1 1\n"),
                       doctest::Contains("distinct"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[initial]\ntype = file\n"),
                       doctest::Contains("initial.path"), ConfigError);
}

TEST_CASE("snapshot writing round-trips bitwise") {
  Grid g = build_grid(16, 8, 2.0, 1.0);
  State s = random_state(g, 0.05, 0.77, 123);
  s.time = 0.123456789012345678;

  fs::path p = scratch_dir() / "snap.dat";
  write_snapshot(s, g, p.string());
  Snapshot back = read_snapshot(p.string());

  CHECK(back.grid.nx == g.nx);
  CHECK(back.grid.ny == g.ny);
  CHECK(back.grid.lx == g.lx);
  CHECK(back.grid.ly == g.ly);
  CHECK(back.state.time == s.time);
  REQUIRE(back.state.phi.v.size() == s.phi.v.size());
  for (std::size_t m = 0; m < s.phi.v.size(); ++m)
    CHECK(back.state.phi.v[m] == s.phi.v[m]);

  // writing the reread state reproduces the file byte for byte
  fs::path p2 = scratch_dir() / "snap2.dat";
  write_snapshot(back.state, back.grid, p2.string());
  CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("timeseries format and determinism") {
  Grid g = build_grid(16, 8, 1.0, 1.0);
  Potential F = quartic_double_well(), G = quartic_double_well();
  SolverParams p;
  p.dt = 1e-4;
  RunOptions opt;
  opt.t_end = 10 * p.dt;
  Trajectory tr = run(random_state(g, 0.0, 0.2, 7), p, F, G, g, opt);

  fs::path c1 = scratch_dir() / "ts1.csv", c2 = scratch_dir() / "ts2.csv";
  write_timeseries(tr, c1.string());
  write_timeseries(tr, c2.string());
  std::string body = slurp(c1);
  CHECK(body == slurp(c2));
  CHECK(body.rfind("t,e_bulk,e_surf,e_total,d_bulk,d_surf,d_visc,m_bulk,m_bot,m_top\n",
                   0) == 0);
  // one line per report plus the header
  std::size_t lines = 0;
  for (char ch : body)
    if (ch == '\n') ++lines;
  CHECK(lines == tr.reports.size() + 1);
}

TEST_CASE("read_snapshot rejects malformed files") {
  fs::path p = scratch_dir() / "broken.dat";
  std::ofstream(p) << "# Nx=16\n# Ny=8\n# Lx=1\nnot a header\n";
  CHECK_THROWS(read_snapshot(p.string()));
  CHECK_THROWS(read_snapshot((scratch_dir() / "missing.dat").string()));
}

TEST_CASE("cli end to end: simulate and verify exit codes") {
  fs::path dir = scratch_dir() / "cli";
  fs::create_directories(dir);
  fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << R"(
[grid]
nx = 16
ny = 8

[scheme]
dt = 1e-4
t_end = 1e-3

[initial]
type = random
amplitude = 0.2
seed = 3
)";

  fs::path out = dir / "out";
  CHECK(run_cli({"simulate", cfg.string(), "-o", out.string()}) == 0);
  CHECK(fs::exists(out / "timeseries.csv"));
  CHECK(fs::exists(out / "final.txt"));

  // bad config is a usage error (2), not a crash
  fs::path bad = dir / "bad.cfg";
  std::ofstream(bad) << "[grid]\nnx = 7\n";
  CHECK(run_cli({"simulate", bad.string(), "-o", out.string()}) == 2);
  CHECK(run_cli({"simulate", (dir / "absent.cfg").string()}) == 2);
}
