// Free energy, chemical potentials and dissipation functionals.
//
// E[phi, psi] = 1/2 ||grad phi||^2 + int F(phi)
//             + 1/2 int_Gamma (kappa |grad_G psi|^2 + psi^2) + int_Gamma G(psi)
// with psi the trace of phi (stored once, as the boundary rows of phi).

#pragma once

#include "chdbc/grid.hpp"
#include "chdbc/potential.hpp"

namespace chdbc {

struct State {
  BulkField phi;
  double time = 0.0;

  State() = default;
  State(const Grid& g, double fill = 0.0) : phi(g, fill) {}
};

struct EnergyReport {
  double time = 0.0;
  double e_bulk = 0.0, e_surf = 0.0, e_total = 0.0;
  double d_bulk = 0.0, d_surf = 0.0, d_visc = 0.0;
  double m_bulk = 0.0, m_bot = 0.0, m_top = 0.0;
};

struct ChemPotentials {
  BulkField mu;           // boundary rows carry the one-sided closure value
  TraceField mu_bot, mu_top;
};

// Energy and mass columns only; dissipation columns stay zero.
EnergyReport total_energy(const State& s, const Potential& F, const Potential& G,
                          double kappa, const Grid& g);

// mu      = -lap phi + (alpha/dt)(phi - phi_old) + F'(phi)        (interior)
// mu_G    = -kappa lap_G psi + psi + dn phi + (alpha/dt)(psi - psi_old) + G'(psi)
// Boundary rows of mu use the second-order one-sided y-closure so the field is
// fully defined. alpha > 0 requires dt > 0 and shape-matched states.
ChemPotentials chemical_potentials(const State& s_new, const State& s_old,
                                   const Potential& F, const Potential& G,
                                   double kappa, double alpha, double dt,
                                   const Grid& g);

struct Dissipation {
  double d_bulk = 0.0;  // ||grad mu||^2
  double d_surf = 0.0;  // ||grad_G mu_G||^2, both circles
};

Dissipation dissipation(const ChemPotentials& c, const Grid& g);

// sqrt( ||phi_a - phi_b||^2_Omega + ||psi_a - psi_b||^2_Gamma ), the H-norm
// distance used by probes and regularization sweeps.
double state_distance(const State& a, const State& b, const Grid& g);

// Bulk L2 norm of the difference (quadrature-weighted).
double bulk_l2_distance(const State& a, const State& b, const Grid& g);

}  // namespace chdbc
