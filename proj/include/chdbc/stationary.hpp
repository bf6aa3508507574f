// Stationary states: the mass-constrained nonlocal elliptic system
//   -lap phi* + F'(phi*) = l1          in Omega
//   -kappa lap_G psi* + psi* + dn phi* + G'(psi*) = l2   on Gamma
//   <phi*> = m_bulk, <psi*> = m_surf
// with the multipliers (l1, l2) as extra unknowns, plus an empirical
// Lyapunov-stability probe around computed equilibria.

#pragma once

#include <cstdint>
#include <utility>

#include "chdbc/energy.hpp"
#include "chdbc/grid.hpp"
#include "chdbc/potential.hpp"
#include "chdbc/solver.hpp"

namespace chdbc {

struct StationaryParams {
  double kappa = 0.1;
  double tol = 1e-9;        // max-norm residual target (scale-free rows)
  int max_iter = 40;        // Newton iterations
  int max_backtracks = 25;  // damping halvings per Newton step
  // phase (i): pseudo-time integration down to a rough equilibrium
  double pseudo_dt = 2e-3;
  double pre_tol = 1e-4;  // stop phase (i) when sqrt(d_bulk)+sqrt(d_surf) < pre_tol
  long max_pseudo_steps = 200000;
  double s_bulk = 2.0, s_surf = 2.0;
};

struct StationaryResult {
  State state;
  double lambda1 = 0.0, lambda2 = 0.0;
  double residual_bulk = 0.0;  // max |-lap phi + F'(phi) - l1| over interior rows
  double residual_surf = 0.0;  // max boundary-row residual (surface eq + flux closure)
  int iterations = 0;          // Newton iterations taken
  long pseudo_steps = 0;
  bool converged = false;      // false = stalled; fields still report the best state
};

// Two-phase solve: pseudo-time to pre_tol, then damped Newton on the dense
// KKT system (nodal phi plus the two multipliers; constraint rows enforce the
// masses). A mass-infeasible init is projected onto the constraints first.
StationaryResult solve_stationary(const State& init, double m_bulk, double m_surf,
                                  const Potential& F, const Potential& G,
                                  const StationaryParams& sp, const Grid& g);

// Mean-value multiplier formulas evaluated with the scheme's own quadrature
// and flux closure, so they are exact identities at a discrete equilibrium:
//   l1 = ( <F'>_O - |G|/|O| <q>_G ) adjusted for the half-cell row,
//   l2 = <q>_G + <psi>_G + <G'>_G,
// q being the discrete normal flux the boundary rows actually carry.
std::pair<double, double> multipliers(const State& s, const Potential& F,
                                      const Potential& G, double kappa,
                                      const Grid& g);

// Multipliers from the 2x2 mass system obtained by testing the stationary
// system with (1,1) and (phi*, psi*):
//   [1, 1; <phi0>, <psi0>] diag(|O|,|G|) (l1,l2)^T = (l1_rhs, l2_rhs)^T.
// Singular when <phi0>_O = <psi0>_G; then `degenerate` is set, the multipliers
// are not touched, and compatibility_gap reports |l2_rhs - l1_rhs <phi0>|.
struct MassSystemMultipliers {
  double lambda1 = 0.0, lambda2 = 0.0;
  bool degenerate = false;
  double compatibility_gap = 0.0;
};
MassSystemMultipliers multipliers_from_mass_system(const State& s, const Potential& F,
                                                   const Potential& G, double kappa,
                                                   const Grid& g);

struct StabilityVerdict {
  int n_trials = 0;
  double max_excursion = 0.0;  // sup_t ||(phi,psi)(t) - (phi*,psi*)||_H over trials
  bool escaped = false;        // some trajectory left the escape ball
  double energy_comparison = 0.0;  // min terminal energy minus E(phi*,psi*)
};

// Runs n mass-neutral perturbations of H-norm radius eps for time t_probe
// (stopping a trial early once it escapes past escape_factor * eps).
// Empirical evidence only, not a proof.
StabilityVerdict stability_probe(const StationaryResult& r, int n, double eps,
                                 double t_probe, const SolverParams& p,
                                 const Potential& F, const Potential& G,
                                 const Grid& g, std::uint64_t seed,
                                 double escape_factor = 10.0);

}  // namespace chdbc
