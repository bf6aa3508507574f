// Initial conditions and reproducible noise. All randomness is counter-based
// (splitmix64 keyed on seed and node index), so fields are identical across
// runs, platforms with IEEE doubles, and any parallel evaluation order.

#pragma once

#include <cstdint>

#include "chdbc/energy.hpp"
#include "chdbc/grid.hpp"

namespace chdbc {

// One splitmix64 mixing round.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic uniform draw in [-1, 1) for counter idx under the given seed.
double uniform_pm1(std::uint64_t seed, std::uint64_t idx);

State constant_state(const Grid& g, double value);

// value[i,j] = mean + amplitude * u(i,j), u white in [-1, 1). The classic
// spinodal start; masses are whatever the draw gives and conserved from there.
State random_state(const Grid& g, double mean, double amplitude, std::uint64_t seed);

// White noise projected onto the constraint tangent space: both circle means
// and the bulk quadrature mean vanish exactly, so adding any multiple leaves
// all three conserved quantities unchanged.
BulkField mass_neutral_noise(const Grid& g, std::uint64_t seed);

// Zero the circle means, then the bulk mean (interior shift only).
void project_mass_neutral(BulkField& f, const Grid& g);

// s.phi += scale * d
void add_scaled(State& s, const BulkField& d, double scale);

}  // namespace chdbc
