// Stabilized linearly-implicit IMEX stepper for the coupled bulk/surface flow.
//
// One step (all linear terms implicit, potentials explicit, stabilization on
// the increments):
//   mu    = -lap phi' + (S_b + a/dt)(phi' - phi) + F'(phi)
//   phi'  = phi + dt lap mu,        dn mu = 0
//   muG   = -kappa lap_G psi' + psi' + dn phi' + (S_s + a/dt)(psi' - psi) + G'(psi)
//   psi'  = psi + dt lap_G muG,     phi'|_Gamma = psi'
// discretized in the trace-consistent weak form, so bulk mass, per-circle
// surface mass and the energy identity are structural, not approximate.

#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <vector>

#include "chdbc/energy.hpp"
#include "chdbc/grid.hpp"
#include "chdbc/potential.hpp"
#include "chdbc/spectral.hpp"

namespace chdbc {

struct SolverParams {
  double dt = 1e-4;
  double kappa = 0.1;
  double alpha = 0.0;
  double s_bulk = 2.0;
  double s_surf = 2.0;
  double max_energy_uptick = 1e-10;  // relative, per accepted step
  int max_halvings = 8;
  bool pin_conserved = true;  // re-pin exact k=0 invariants after each solve
};

void validate(const SolverParams& p);

struct StepReport {
  double dt_accepted = 0.0;
  int halvings = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double solve_residual = 0.0;  // max relative banded residual over modes
  double d_bulk = 0.0, d_surf = 0.0, d_visc = 0.0;  // scheme-internal dissipation
};

struct Trajectory {
  std::vector<EnergyReport> reports;  // strictly increasing times, starts at t0
  std::vector<State> snapshots;
  std::vector<double> snapshot_times;
  State final_state;
  double dt_nominal = 0.0;
  int steps_taken = 0;
  int total_halvings = 0;
  bool reached_equilibrium = false;
};

struct RunOptions {
  double t_end = 1.0;
  long max_steps = std::numeric_limits<long>::max();
  int report_every = 1;        // record an EnergyReport every n accepted steps
  int snapshot_every = 0;      // 0 = none (initial/final state always kept)
  double equilibrium_tol = 0.0;  // stop when ||grad mu|| + ||grad_G muG|| < tol
  std::function<void(const State&, const StepReport&)> observer;
  std::function<bool(const State&, const StepReport&)> stop_when;  // early stop
};

// Holds the factorized mode systems; reuse across steps at fixed dt.
class Stepper {
 public:
  Stepper(const Grid& g, const Potential& F, const Potential& G, SolverParams p);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  // Advances s by p.dt (halving on energy uptick); throws if max_halvings
  // does not cure the uptick.
  StepReport step(State& s);

  // Scheme-internal potentials of the last accepted step.
  const ChemPotentials& last_potentials() const { return pots_; }
  const SolverParams& params() const { return p_; }
  const Grid& grid() const { return g_; }

 private:
  struct Bank;  // factorized systems for one dt
  const Bank& bank_for(double dt);
  double attempt(const State& s, double dt, State& out, ChemPotentials& pots,
                 double& residual);

  Grid g_;
  Potential f_, gpot_;
  SolverParams p_;
  SpectralWorkspace ws_;
  std::map<double, std::unique_ptr<Bank>> banks_;
  ChemPotentials pots_;
  bool have_energy_ = false;
  double energy_cache_ = 0.0;
};

// One-shot convenience wrapper around Stepper.
StepReport step(State& s, const SolverParams& p, const Potential& F,
                const Potential& G, const Grid& g);

Trajectory run(const State& s0, const SolverParams& p, const Potential& F,
               const Potential& G, const Grid& g, const RunOptions& opt);

}  // namespace chdbc
