#include "chdbc/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chdbc {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void io_fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

}  // namespace

void write_timeseries(const Trajectory& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) io_fail("cannot open timeseries for writing", path);
  out << "t,e_bulk,e_surf,e_total,d_bulk,d_surf,d_visc,m_bulk,m_bot,m_top\n";
  for (const EnergyReport& r : tr.reports) {
    out << fmt(r.time) << ',' << fmt(r.e_bulk) << ',' << fmt(r.e_surf) << ','
        << fmt(r.e_total) << ',' << fmt(r.d_bulk) << ',' << fmt(r.d_surf) << ','
        << fmt(r.d_visc) << ',' << fmt(r.m_bulk) << ',' << fmt(r.m_bot) << ','
        << fmt(r.m_top) << '\n';
  }
  if (!out) io_fail("write failed", path);
}

void write_snapshot(const State& s, const Grid& g, const std::string& path) {
  if (s.phi.nx != g.nx || s.phi.ny != g.ny)
    throw std::invalid_argument("write_snapshot: state/grid shape mismatch");
  std::ofstream out(path);
  if (!out) io_fail("cannot open snapshot for writing", path);
  out << "# Nx=" << g.nx << '\n';
  out << "# Ny=" << g.ny << '\n';
  out << "# Lx=" << fmt(g.lx) << '\n';
  out << "# Ly=" << fmt(g.ly) << '\n';
  out << "# t=" << fmt(s.time) << '\n';
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) out << ' ';
      out << fmt(s.phi(i, j));
    }
    out << '\n';
  }
  if (!out) io_fail("write failed", path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) io_fail("cannot open snapshot", path);

  int nx = -1, ny = -1;
  double lx = 0.0, ly = 0.0, t = 0.0;
  bool have_t = false;
  std::string line;
  auto header = [&](const char* prefix, const std::string& l, const char*& rest) {
    const std::size_t n = std::strlen(prefix);
    if (l.compare(0, n, prefix) != 0) return false;
    rest = l.c_str() + n;
    return true;
  };
  while (in.peek() == '#') {
    std::getline(in, line);
    const char* rest = nullptr;
    if (header("# Nx=", line, rest))
      nx = std::atoi(rest);
    else if (header("# Ny=", line, rest))
      ny = std::atoi(rest);
    else if (header("# Lx=", line, rest))
      lx = std::strtod(rest, nullptr);
    else if (header("# Ly=", line, rest))
      ly = std::strtod(rest, nullptr);
    else if (header("# t=", line, rest)) {
      t = std::strtod(rest, nullptr);
      have_t = true;
    } else
      io_fail("unrecognized snapshot header '" + line + "'", path);
  }
  if (nx < 0 || ny < 0 || lx <= 0.0 || ly <= 0.0 || !have_t)
    io_fail("incomplete snapshot header", path);

  Snapshot snap;
  snap.grid = build_grid(nx, ny, lx, ly);
  snap.state = State(snap.grid);
  snap.state.time = t;
  for (int j = 0; j <= ny; ++j) {
    if (!std::getline(in, line)) io_fail("snapshot truncated", path);
    const char* p = line.c_str();
    char* end = nullptr;
    for (int i = 0; i < nx; ++i) {
      const double v = std::strtod(p, &end);
      if (end == p) io_fail("bad value in snapshot row " + std::to_string(j), path);
      snap.state.phi(i, j) = v;
      p = end;
    }
  }
  return snap;
}

}  // namespace chdbc
