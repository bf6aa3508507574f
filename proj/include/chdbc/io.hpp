// Bit-stable text output: CSV time series and self-describing snapshots.
// All doubles are written with %.17g, which round-trips IEEE doubles exactly.

#pragma once

#include <string>

#include "chdbc/grid.hpp"
#include "chdbc/solver.hpp"

namespace chdbc {

// CSV with header t,e_bulk,e_surf,e_total,d_bulk,d_surf,d_visc,m_bulk,m_bot,m_top
void write_timeseries(const Trajectory& tr, const std::string& path);

// Header lines `# Nx=`, `# Ny=`, `# Lx=`, `# Ly=`, `# t=`, then one y-row of
// nodal values per line.
void write_snapshot(const State& s, const Grid& g, const std::string& path);

struct Snapshot {
  State state;
  Grid grid;
};

// Inverse of write_snapshot; the result is bitwise identical to what was
// written.
Snapshot read_snapshot(const std::string& path);

}  // namespace chdbc
