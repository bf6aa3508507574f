// Run configuration: a line-oriented `key = value` format under [section]
// headers. Unknown keys are hard errors; missing keys take the documented
// defaults below. '#' starts a comment.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chdbc/potential.hpp"

namespace chdbc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  // [grid]
  int nx = 64, ny = 64;
  double lx = 1.0, ly = 1.0;
  // [model]
  double kappa = 0.1;
  double alpha = 0.0;
  std::string potential_bulk = "quartic";
  std::string potential_surf = "quartic";  // quartic | zero | contact_line
  double surf_gamma = 1.0;                 // contact_line parameters
  double surf_theta = 1.0471975511965976;  // pi/3
  // [scheme]
  double dt = 1e-4;
  double t_end = 1.0;
  double s_bulk = 2.0, s_surf = 2.0;
  double uptick_tol = 1e-10;
  double equilibrium_tol = 0.0;  // 0 = run to t_end
  double stationary_tol = 1e-9;
  int max_halvings = 8;
  int report_every = 1;
  int snapshot_every = 0;
  // [initial]
  enum class Init { constant, random, file };
  Init init = Init::constant;
  double value = 0.0;      // constant level
  double mean = 0.0;       // random: center
  double amplitude = 0.1;  // random: uniform half-width
  std::uint64_t seed = 1;  // random: draw key
  std::string path;        // file: snapshot to load
  // [sweep]
  bool has_sweep = false;
  std::string sweep_parameter;  // alpha | kappa | dt | s_bulk | s_surf
  std::vector<double> sweep_values;
};

// Throws ConfigError with a line number on malformed input and with the key
// path on semantic violations.
RunSpec parse_config(const std::string& text);

// Reads and parses a config file; errors carry the path.
RunSpec load_config(const std::string& path);

Potential bulk_potential(const RunSpec& spec);
Potential surf_potential(const RunSpec& spec);

// Returns a copy with the swept parameter replaced.
RunSpec with_sweep_value(const RunSpec& spec, double value);

}  // namespace chdbc
