#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "chdbc/energy.hpp"
#include "chdbc/grid.hpp"
#include "chdbc/potential.hpp"

using namespace chdbc;

namespace {
const Grid g16 = build_grid(16, 16, 1.0, 1.0);
}

TEST_CASE("energy of constant states on the unit square") {
  Potential F = quartic_double_well(), G = quartic_double_well();

  // E(0) = F(0)|O| + G(0)|Gamma| = 0.25 + 0.5
  State s0(g16, 0.0);
  EnergyReport r0 = total_energy(s0, F, G, 0.1, g16);
  CHECK(r0.e_total == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(r0.e_bulk == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r0.e_surf == doctest::Approx(0.5).epsilon(1e-14));

  // E(1) = 0 + psi^2/2 |Gamma| = 1
  State s1(g16, 1.0);
  EnergyReport r1 = total_energy(s1, F, G, 0.1, g16);
  CHECK(r1.e_total == doctest::Approx(1.0).epsilon(1e-14));

  // E(1/2) = 0.140625 + 0.25 + 0.28125
  State sh(g16, 0.5);
  EnergyReport rh = total_energy(sh, F, G, 0.1, g16);
  CHECK(rh.e_total == doctest::Approx(0.671875).epsilon(1e-14));
  CHECK(rh.m_bulk == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rh.m_bot == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rh.m_top == doctest::Approx(0.5).epsilon(1e-14));

  // kappa does not matter for constants
  EnergyReport rk = total_energy(sh, F, G, 7.0, g16);
  CHECK(rk.e_total == doctest::Approx(rh.e_total).epsilon(1e-15));
}

TEST_CASE("chemical potentials at a constant state") {
  Potential F = quartic_double_well(), G = quartic_double_well();
  State s(g16, 0.5);
  ChemPotentials c = chemical_potentials(s, s, F, G, 0.1, 0.0, 1.0, g16);
  for (int j = 0; j <= g16.ny; ++j)
    for (int i = 0; i < g16.nx; ++i)
      CHECK(c.mu(i, j) == doctest::Approx(-0.375).epsilon(1e-13));
  for (int i = 0; i < g16.nx; ++i) {
    CHECK(c.mu_bot[i] == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(c.mu_top[i] == doctest::Approx(0.125).epsilon(1e-13));
  }
  Dissipation d = dissipation(c, g16);
  CHECK(d.d_bulk == doctest::Approx(0.0));
  CHECK(d.d_surf == doctest::Approx(0.0));
}

TEST_CASE("chemical potential stencils are exact on quadratics") {
  Potential Z = zero_potential();
  State s(g16, 0.0);
  for (int j = 0; j <= g16.ny; ++j)
    for (int i = 0; i < g16.nx; ++i) s.phi(i, j) = g16.y(j) * g16.y(j);

  ChemPotentials c = chemical_potentials(s, s, Z, Z, 1.0, 0.0, 1.0, g16);
  // mu = -lap y^2 = -2, including the one-sided boundary closures
  for (int j = 0; j <= g16.ny; ++j)
    for (int i = 0; i < g16.nx; ++i)
      CHECK(c.mu(i, j) == doctest::Approx(-2.0).epsilon(1e-10));
  // muG = -kappa lapG psi + psi + dn phi: bottom 0 + 0 + 0, top 1 + 2
  for (int i = 0; i < g16.nx; ++i) {
    CHECK(c.mu_bot[i] == doctest::Approx(0.0).epsilon(1e-11));
    CHECK(c.mu_top[i] == doctest::Approx(3.0).epsilon(1e-11));
  }
}

TEST_CASE("viscous term needs a positive dt") {
  Potential F = quartic_double_well();
  State s(g16, 0.0);
  CHECK_THROWS_AS(chemical_potentials(s, s, F, F, 0.1, 0.5, 0.0, g16),
                  std::invalid_argument);
}

TEST_CASE("state distances") {
  State a(g16, 1.0), b(g16, 3.0);
  CHECK(state_distance(a, a, g16) == doctest::Approx(0.0));
  // bulk (2^2)(1) + surface (2^2)(2) => sqrt(12)
  CHECK(state_distance(a, b, g16) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-13));
  CHECK(bulk_l2_distance(a, b, g16) == doctest::Approx(2.0).epsilon(1e-13));
}
