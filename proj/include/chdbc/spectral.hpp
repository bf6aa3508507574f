// Per-wavenumber machinery: DFT along the periodic direction decouples every
// implicit solve into small banded systems in y, one per mode k.
//
// Unknown ordering per mode (size 2(ny+1)+2, bandwidth 3/3):
//   [ muG_bot, (dphi_0, mu_0), (dphi_1, mu_1), ..., (dphi_ny, mu_ny), muG_top ]
// where dphi is the increment phi^{n+1} - phi^n. Row layout mirrors it:
//   [ trace_bot, (flux_0, weak_0), ..., (flux_ny, weak_ny), trace_top ].
// flux rows are the bulk evolution tested with nodal deltas, weak rows the
// chemical-potential identity tested with trace-consistent deltas, trace rows
// the surface evolution.

#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "chdbc/grid.hpp"

namespace chdbc {

using cplx = std::complex<double>;

// LAPACK general banded matrix + LU. Assembly via at(r, c); factor() runs
// dgbtrf in place, solve() backsubstitutes.
struct BandedMatrix {
  int n = 0, kl = 0, ku = 0, ldab = 0;
  std::vector<double> ab;  // column-major band storage, ldab x n
  std::vector<int> ipiv;
  bool factored = false;

  BandedMatrix() = default;
  BandedMatrix(int n_, int kl_, int ku_);
  double& at(int r, int c);
  double get(int r, int c) const;
  void factor();
  void solve(double* b, int nrhs) const;          // b is n x nrhs column-major
  void solve(cplx* b) const;                      // complex RHS, two real solves
  void apply(const double* x, double* y) const;   // y = A x (unfactored only)
  void apply(const cplx* x, cplx* y) const;
};

// Discrete symbol of the periodic three-point -d_xx at wavenumber k.
double mode_lambda(int k, const Grid& g);

// FFTW plans for one grid; forward/inverse between nodal fields and
// mode-major spectra (index k*(ny+1)+j for bulk, k*2+{0,1} for traces).
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid& g);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  int n_modes() const { return g_.nx / 2 + 1; }
  const Grid& grid() const { return g_; }

  void forward(const BulkField& f, std::vector<cplx>& spec) const;
  void inverse(const std::vector<cplx>& spec, BulkField& f) const;
  void forward_trace(const TraceField& bot, const TraceField& top,
                     std::vector<cplx>& spec) const;
  void inverse_trace(const std::vector<cplx>& spec, TraceField& bot,
                     TraceField& top) const;

 private:
  Grid g_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One time-step mode system (increment form). factor=false keeps the matrix
// applyable for residual checks and structural tests.
BandedMatrix assemble_mode_system(int k, const Grid& g, double dt, double kappa,
                                  double alpha, double s_bulk, double s_surf,
                                  bool factor = true);

// The elliptic subproblem mode system (no time terms; tridiagonal in phi):
//   -lap phi = h1,  -kappa lap_G psi + psi + dn phi = h2,  phi|_Gamma = psi.
BandedMatrix assemble_elliptic_mode(int k, const Grid& g, double kappa,
                                    bool factor = true);

BulkField solve_elliptic(const BulkField& h1, const TraceField& h2_bot,
                         const TraceField& h2_top, double kappa, const Grid& g);

// Discrete H^-1 seminorm: strips the quadrature mean, inverts the Neumann
// Laplacian mode-by-mode (zero mode pinned on its kernel), returns
// sqrt((f - <f>, u)) where -lap u = f - <f>.
double hminus1_seminorm(const BulkField& f, const Grid& g);

}  // namespace chdbc
