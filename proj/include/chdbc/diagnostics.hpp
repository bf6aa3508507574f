// Post-hoc verification on computed trajectories: conservation and energy-law
// checks, decay-rate fitting, manufactured-solution convergence for the
// elliptic subproblem, an independent dense reference step, and the
// continuous-dependence probe. Everything here is a pure function of its
// inputs; rerunning a check never mutates data.

#pragma once

#include <vector>

#include "chdbc/energy.hpp"
#include "chdbc/grid.hpp"
#include "chdbc/potential.hpp"
#include "chdbc/solver.hpp"

namespace chdbc {

struct ConservationReport {
  double drift_bulk = 0.0, drift_bot = 0.0, drift_top = 0.0;  // max |m(t) - m(0)|
  int worst_index = 0;  // report index where the largest drift occurs
  bool pass = false;
  double tol = 0.0;
};
ConservationReport check_conservation(const Trajectory& tr, double tol);

// Monotonicity + per-step defect |dE/dt + d_bulk + d_surf + d_visc|. The
// defect column is meaningful only when the trajectory was recorded every
// step (report_every = 1); monotonicity is meaningful at any cadence.
struct EnergyLawReport {
  bool monotone = false;     // within uptick_tol * (1 + |E|) per interval
  int n_upticks = 0;
  double max_uptick_rel = 0.0;
  double max_defect = 0.0, mean_defect = 0.0;
  bool visc_nonneg = false;
  bool pass = false;
};
EnergyLawReport check_energy_law(const Trajectory& tr, double uptick_tol);

// Mean per-step defect over reports with t in [t_lo, t_hi] (needs every-step
// reports); the window lets dt-halving studies compare like with like.
double mean_defect(const Trajectory& tr, double t_lo, double t_hi);

// Consecutive ratios mean_defect(runs[l]) / mean_defect(runs[l+1]); runs
// ordered coarse to fine. A first-order scheme gives ratios near 2.
std::vector<double> defect_ratios(const std::vector<Trajectory>& runs, double t_lo,
                                  double t_hi);

struct RateFit {
  enum class Model { power, exponential };
  bool decaying = false;  // false: no model fitted (flat or growing gaps)
  Model model = Model::exponential;
  double exponent = 0.0;  // gap ~ (1+t)^{-exponent}   (power model)
  double rate = 0.0;      // gap ~ exp(-rate t)        (exponential model)
  double theta = 0.0;     // Lojasiewicz exponent: exponent = 1/(1-2 theta)
  double residual = 0.0;  // RMS residual of the winning fit, log scale
};

// Fits both models to positive gaps on the log scale and keeps the one with
// the smaller residual. Callers supply gaps = E(t) - E_inf (see
// estimate_e_inf) and should trim the terminal round-off plateau.
RateFit fit_decay_rate(const std::vector<double>& times,
                       const std::vector<double>& gaps);

// Terminal-plateau estimate of E_inf: mean of e_total over the last 5% of
// reports (at least one).
double estimate_e_inf(const Trajectory& tr);

struct EllipticConvergence {
  double kappa = 0.0;
  std::vector<int> resolutions;
  std::vector<double> err_phi, err_psi;        // max-norm errors per resolution
  std::vector<double> order_phi, order_psi;    // observed orders between levels
  std::vector<double> stability_ratio;         // err / (||h1|| + ||h2||)
};

// Manufactured solution phi = cos(2 pi x) cos(pi y) on the unit square for
//   -lap phi = h1,  -kappa lap_G psi + psi + dn phi = h2,  phi|_G = psi,
// solved with the production mode systems (time terms removed).
EllipticConvergence manufactured_elliptic_test(const std::vector<int>& resolutions,
                                               double kappa);

// One IMEX step assembled densely in real space (every node, no FFT), solved
// with a dense LU. Independent of the spectral path on purpose: the two must
// agree to round-off on the same inputs.
State dense_reference_step(const State& s, const SolverParams& p, const Potential& F,
                           const Potential& G, const Grid& g);

struct SensitivityReport {
  std::vector<double> times;
  std::vector<double> norms;   // H^-1 proxy seminorm of phi_a - phi_b
  std::vector<double> ratios;  // norms / norms[0]
  double growth_rate = 0.0;    // fitted K in ratio <= exp(K t)
  bool exact_match = false;    // identical initial data; ratios forced to 1
};

// Compares two runs with equal masses and aligned snapshot times in the
// spectral H^-1 proxy seminorm (zero mode excluded). Mass mismatch or
// misaligned snapshots are rejected.
SensitivityReport perturbation_sensitivity(const Trajectory& a, const Trajectory& b,
                                           const Grid& g);

}  // namespace chdbc
