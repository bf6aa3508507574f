#include "chdbc/init.hpp"

#include <stdexcept>

namespace chdbc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform_pm1(std::uint64_t seed, std::uint64_t idx) {
  const std::uint64_t z = splitmix64(seed ^ splitmix64(idx));
  // top 53 bits -> [0,1), then shift to [-1,1)
  return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
}

State constant_state(const Grid& g, double value) { return State(g, value); }

State random_state(const Grid& g, double mean, double amplitude, std::uint64_t seed) {
  State s(g);
  for (std::size_t idx = 0; idx < s.phi.v.size(); ++idx)
    s.phi.v[idx] = mean + amplitude * uniform_pm1(seed, idx);
  return s;
}

void project_mass_neutral(BulkField& f, const Grid& g) {
  if (f.nx != g.nx || f.ny != g.ny)
    throw std::invalid_argument("project_mass_neutral: field/grid shape mismatch");
  for (const int j : {0, g.ny}) {
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i) m += f(i, j);
    m /= g.nx;
    for (int i = 0; i < g.nx; ++i) f(i, j) -= m;
  }
  // interior-only shift: leaves the circle rows (already mean-free) alone
  double mb = 0.0;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) mb += g.wy(j) * f(i, j);
  mb /= static_cast<double>(g.nx) * g.ny;          // quadrature mean
  const double shift = mb * g.ny / (g.ny - 1.0);   // interior volume fraction
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) -= shift;
}

BulkField mass_neutral_noise(const Grid& g, std::uint64_t seed) {
  BulkField f(g);
  for (std::size_t idx = 0; idx < f.v.size(); ++idx)
    f.v[idx] = uniform_pm1(seed, idx);
  project_mass_neutral(f, g);
  return f;
}

void add_scaled(State& s, const BulkField& d, double scale) {
  if (!s.phi.same_shape(d))
    throw std::invalid_argument("add_scaled: field shape mismatch");
  for (std::size_t idx = 0; idx < d.v.size(); ++idx) s.phi.v[idx] += scale * d.v[idx];
}

}  // namespace chdbc
