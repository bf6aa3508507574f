#include "chdbc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace chdbc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail_line(line, "value of '" + key + "' is not a number: '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(x))
    fail_line(line, "value of '" + key + "' is not a finite number: '" + v + "'");
  return x;
}

long parse_int(const std::string& v, int line, const std::string& key) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    fail_line(line, "value of '" + key + "' is not an integer: '" + v + "'");
  }
  if (pos != v.size())
    fail_line(line, "value of '" + key + "' is not an integer: '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &pos);
  } catch (const std::exception&) {
    fail_line(line, "value of '" + key + "' is not an unsigned integer: '" + v + "'");
  }
  if (pos != v.size())
    fail_line(line, "value of '" + key + "' is not an unsigned integer: '" + v + "'");
  return x;
}

}  // namespace

RunSpec parse_config(const std::string& text) {
  RunSpec spec;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail_line(line, "unterminated section header: '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> known = {"grid", "model", "scheme", "initial",
                                                  "sweep"};
      if (!known.count(section)) fail_line(line, "unknown section [" + section + "]");
      if (section == "sweep") spec.has_sweep = true;
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_line(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail_line(line, "empty key");
    if (val.empty()) fail_line(line, "empty value for '" + key + "'");
    if (section.empty()) fail_line(line, "key '" + key + "' outside any [section]");

    if (section == "grid") {
      if (key == "nx")
        spec.nx = static_cast<int>(parse_int(val, line, key));
      else if (key == "ny")
        spec.ny = static_cast<int>(parse_int(val, line, key));
      else if (key == "lx")
        spec.lx = parse_double(val, line, key);
      else if (key == "ly")
        spec.ly = parse_double(val, line, key);
      else
        fail_line(line, "unknown key '" + key + "' in [grid]");
    } else if (section == "model") {
      if (key == "kappa")
        spec.kappa = parse_double(val, line, key);
      else if (key == "alpha")
        spec.alpha = parse_double(val, line, key);
      else if (key == "potential_bulk")
        spec.potential_bulk = val;
      else if (key == "potential_surf")
        spec.potential_surf = val;
      else if (key == "surf_gamma")
        spec.surf_gamma = parse_double(val, line, key);
      else if (key == "surf_theta")
        spec.surf_theta = parse_double(val, line, key);
      else
        fail_line(line, "unknown key '" + key + "' in [model]");
    } else if (section == "scheme") {
      if (key == "dt")
        spec.dt = parse_double(val, line, key);
      else if (key == "t_end")
        spec.t_end = parse_double(val, line, key);
      else if (key == "s_bulk")
        spec.s_bulk = parse_double(val, line, key);
      else if (key == "s_surf")
        spec.s_surf = parse_double(val, line, key);
      else if (key == "uptick_tol")
        spec.uptick_tol = parse_double(val, line, key);
      else if (key == "equilibrium_tol")
        spec.equilibrium_tol = parse_double(val, line, key);
      else if (key == "stationary_tol")
        spec.stationary_tol = parse_double(val, line, key);
      else if (key == "max_halvings")
        spec.max_halvings = static_cast<int>(parse_int(val, line, key));
      else if (key == "report_every")
        spec.report_every = static_cast<int>(parse_int(val, line, key));
      else if (key == "snapshot_every")
        spec.snapshot_every = static_cast<int>(parse_int(val, line, key));
      else
        fail_line(line, "unknown key '" + key + "' in [scheme]");
    } else if (section == "initial") {
      if (key == "type") {
        if (val == "constant")
          spec.init = RunSpec::Init::constant;
        else if (val == "random")
          spec.init = RunSpec::Init::random;
        else if (val == "file")
          spec.init = RunSpec::Init::file;
        else
          fail_line(line, "initial type must be constant|random|file, got '" + val + "'");
      } else if (key == "value")
        spec.value = parse_double(val, line, key);
      else if (key == "mean")
        spec.mean = parse_double(val, line, key);
      else if (key == "amplitude")
        spec.amplitude = parse_double(val, line, key);
      else if (key == "path")
        spec.path = val;
      else if (key == "seed")
        spec.seed = parse_u64(val, line, key);
      else
        fail_line(line, "unknown key '" + key + "' in [initial]");
    } else {  // sweep
      if (key == "parameter")
        spec.sweep_parameter = val;
      else if (key == "values") {
        std::istringstream vs(val);
        std::string tok;
        spec.sweep_values.clear();
        while (vs >> tok) spec.sweep_values.push_back(parse_double(tok, line, key));
      } else
        fail_line(line, "unknown key '" + key + "' in [sweep]");
    }
  }

  // semantic checks, keyed by path
  auto semantic = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (spec.nx < 8 || (spec.nx & (spec.nx - 1)) != 0)
    semantic("grid.nx must be a power of two >= 8");
  if (spec.ny < 8) semantic("grid.ny must be >= 8");
  if (!(spec.lx > 0.0) || !(spec.ly > 0.0)) semantic("grid.lx/ly must be > 0");
  if (spec.kappa < 0.0) semantic("model.kappa must be >= 0");
  if (spec.alpha < 0.0) semantic("model.alpha must be >= 0");
  if (!(spec.dt > 0.0)) semantic("scheme.dt must be > 0");
  if (spec.t_end < 0.0) semantic("scheme.t_end must be >= 0");
  if (spec.s_bulk < 0.0 || spec.s_surf < 0.0) semantic("scheme.s_bulk/s_surf must be >= 0");
  if (!(spec.uptick_tol > 0.0)) semantic("scheme.uptick_tol must be > 0");
  if (spec.equilibrium_tol < 0.0) semantic("scheme.equilibrium_tol must be >= 0");
  if (!(spec.stationary_tol > 0.0)) semantic("scheme.stationary_tol must be > 0");
  if (spec.max_halvings < 0) semantic("scheme.max_halvings must be >= 0");
  if (spec.report_every < 1) semantic("scheme.report_every must be >= 1");
  if (spec.snapshot_every < 0) semantic("scheme.snapshot_every must be >= 0");
  if (spec.amplitude < 0.0) semantic("initial.amplitude must be >= 0");
  if (spec.init == RunSpec::Init::file && spec.path.empty())
    semantic("initial.path required for type = file");
  for (const auto& name : {spec.potential_bulk, spec.potential_surf})
    if (name != "quartic" && name != "zero" && name != "contact_line")
      semantic("unknown potential '" + name + "'");
  if (spec.potential_bulk == "contact_line")
    semantic("model.potential_bulk: contact_line is surface-only");
  if (spec.has_sweep) {
    static const std::set<std::string> ok = {"alpha", "kappa", "dt", "s_bulk", "s_surf"};
    if (!ok.count(spec.sweep_parameter))
      semantic("sweep.parameter must be one of alpha|kappa|dt|s_bulk|s_surf");
    if (spec.sweep_values.empty()) semantic("sweep.values must be nonempty");
    for (const double v : spec.sweep_values)
      if (!std::isfinite(v)) semantic("sweep.values must be finite");
    auto sorted = spec.sweep_values;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      semantic("sweep.values must be distinct");
  }
  return spec;
}

RunSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Potential bulk_potential(const RunSpec& spec) {
  return potential_by_name(spec.potential_bulk);
}

Potential surf_potential(const RunSpec& spec) {
  if (spec.potential_surf == "contact_line")
    return contact_line_surface(spec.surf_gamma, spec.surf_theta);
  return potential_by_name(spec.potential_surf);
}

RunSpec with_sweep_value(const RunSpec& spec, double value) {
  RunSpec out = spec;
  if (spec.sweep_parameter == "alpha")
    out.alpha = value;
  else if (spec.sweep_parameter == "kappa")
    out.kappa = value;
  else if (spec.sweep_parameter == "dt")
    out.dt = value;
  else if (spec.sweep_parameter == "s_bulk")
    out.s_bulk = value;
  else if (spec.sweep_parameter == "s_surf")
    out.s_surf = value;
  else
    throw ConfigError("with_sweep_value: no sweep parameter set");
  return out;
}

}  // namespace chdbc
