#include "chdbc/spectral.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace chdbc {

namespace {
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

BandedMatrix::BandedMatrix(int n_, int kl_, int ku_)
    : n(n_), kl(kl_), ku(ku_), ldab(2 * kl_ + ku_ + 1),
      ab(static_cast<std::size_t>(ldab) * n_, 0.0), ipiv(n_, 0) {}

double& BandedMatrix::at(int r, int c) {
  return ab[static_cast<std::size_t>(c) * ldab + (kl + ku + r - c)];
}

double BandedMatrix::get(int r, int c) const {
  if (c - r > ku || r - c > kl) return 0.0;
  return ab[static_cast<std::size_t>(c) * ldab + (kl + ku + r - c)];
}

void BandedMatrix::factor() {
  const int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab,
                                  ipiv.data());
  if (info != 0)
    throw std::runtime_error("banded LU failed (info=" + std::to_string(info) +
                             "): mode system singular, closure rows mis-assembled");
  factored = true;
}

void BandedMatrix::solve(double* b, int nrhs) const {
  if (!factored) throw std::logic_error("BandedMatrix::solve before factor");
  const int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, nrhs,
                                  ab.data(), ldab, ipiv.data(), b, n);
  if (info != 0) throw std::runtime_error("banded backsolve failed");
}

void BandedMatrix::solve(cplx* b) const {
  std::vector<double> rhs(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rhs[i] = b[i].real();
    rhs[n + i] = b[i].imag();
  }
  solve(rhs.data(), 2);
  for (int i = 0; i < n; ++i) b[i] = cplx(rhs[i], rhs[n + i]);
}

void BandedMatrix::apply(const double* x, double* y) const {
  if (factored) throw std::logic_error("BandedMatrix::apply after factor");
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    const int c0 = std::max(0, r - kl), c1 = std::min(n - 1, r + ku);
    for (int c = c0; c <= c1; ++c) s += get(r, c) * x[c];
    y[r] = s;
  }
}

void BandedMatrix::apply(const cplx* x, cplx* y) const {
  if (factored) throw std::logic_error("BandedMatrix::apply after factor");
  for (int r = 0; r < n; ++r) {
    cplx s = 0.0;
    const int c0 = std::max(0, r - kl), c1 = std::min(n - 1, r + ku);
    for (int c = c0; c <= c1; ++c) s += get(r, c) * x[c];
    y[r] = s;
  }
}

double mode_lambda(int k, const Grid& g) {
  const double s = std::sin(std::numbers::pi * k / g.nx);
  const double t = 2.0 * s / g.dx;
  return t * t;
}

struct SpectralWorkspace::Impl {
  int nx, nrows, nm;
  double* rbulk;        // nrows x nx real scratch
  fftw_complex* cbulk;  // nrows x nm complex scratch (row-major in j)
  double* rtr;          // 2 x nx
  fftw_complex* ctr;    // 2 x nm
  fftw_plan fwd_bulk, bwd_bulk, fwd_tr, bwd_tr;

  Impl(int nx_, int nrows_) : nx(nx_), nrows(nrows_), nm(nx_ / 2 + 1) {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    rbulk = fftw_alloc_real(static_cast<std::size_t>(nrows) * nx);
    cbulk = fftw_alloc_complex(static_cast<std::size_t>(nrows) * nm);
    rtr = fftw_alloc_real(2 * static_cast<std::size_t>(nx));
    ctr = fftw_alloc_complex(2 * static_cast<std::size_t>(nm));
    const int n[1] = {nx};
    fwd_bulk = fftw_plan_many_dft_r2c(1, n, nrows, rbulk, nullptr, 1, nx, cbulk,
                                      nullptr, 1, nm, FFTW_ESTIMATE);
    bwd_bulk = fftw_plan_many_dft_c2r(1, n, nrows, cbulk, nullptr, 1, nm, rbulk,
                                      nullptr, 1, nx, FFTW_ESTIMATE);
    fwd_tr = fftw_plan_many_dft_r2c(1, n, 2, rtr, nullptr, 1, nx, ctr, nullptr, 1,
                                    nm, FFTW_ESTIMATE);
    bwd_tr = fftw_plan_many_dft_c2r(1, n, 2, ctr, nullptr, 1, nm, rtr, nullptr, 1,
                                    nx, FFTW_ESTIMATE);
    if (!fwd_bulk || !bwd_bulk || !fwd_tr || !bwd_tr)
      throw std::runtime_error("fftw plan creation failed");
  }
  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd_bulk);
    fftw_destroy_plan(bwd_bulk);
    fftw_destroy_plan(fwd_tr);
    fftw_destroy_plan(bwd_tr);
    fftw_free(rbulk);
    fftw_free(cbulk);
    fftw_free(rtr);
    fftw_free(ctr);
  }
};

SpectralWorkspace::SpectralWorkspace(const Grid& g)
    : g_(g), impl_(std::make_unique<Impl>(g.nx, g.ny + 1)) {}

SpectralWorkspace::~SpectralWorkspace() = default;

void SpectralWorkspace::forward(const BulkField& f, std::vector<cplx>& spec) const {
  auto& im = *impl_;
  std::memcpy(im.rbulk, f.v.data(), f.v.size() * sizeof(double));
  fftw_execute(im.fwd_bulk);
  spec.resize(static_cast<std::size_t>(im.nm) * im.nrows);
  // transpose rows-of-j into per-mode contiguous y-profiles
  for (int j = 0; j < im.nrows; ++j)
    for (int k = 0; k < im.nm; ++k) {
      const fftw_complex& z = im.cbulk[static_cast<std::size_t>(j) * im.nm + k];
      spec[static_cast<std::size_t>(k) * im.nrows + j] = cplx(z[0], z[1]);
    }
}

void SpectralWorkspace::inverse(const std::vector<cplx>& spec, BulkField& f) const {
  auto& im = *impl_;
  for (int j = 0; j < im.nrows; ++j)
    for (int k = 0; k < im.nm; ++k) {
      fftw_complex& z = im.cbulk[static_cast<std::size_t>(j) * im.nm + k];
      const cplx v = spec[static_cast<std::size_t>(k) * im.nrows + j];
      z[0] = v.real();
      z[1] = v.imag();
    }
  fftw_execute(im.bwd_bulk);
  f.nx = g_.nx;
  f.ny = g_.ny;
  f.v.resize(g_.n_nodes());
  const double scale = 1.0 / g_.nx;
  for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = im.rbulk[i] * scale;
}

void SpectralWorkspace::forward_trace(const TraceField& bot, const TraceField& top,
                                      std::vector<cplx>& spec) const {
  auto& im = *impl_;
  std::memcpy(im.rtr, bot.v.data(), static_cast<std::size_t>(im.nx) * sizeof(double));
  std::memcpy(im.rtr + im.nx, top.v.data(),
              static_cast<std::size_t>(im.nx) * sizeof(double));
  fftw_execute(im.fwd_tr);
  spec.resize(2 * static_cast<std::size_t>(im.nm));
  for (int k = 0; k < im.nm; ++k) {
    spec[2 * k] = cplx(im.ctr[k][0], im.ctr[k][1]);
    spec[2 * k + 1] = cplx(im.ctr[im.nm + k][0], im.ctr[im.nm + k][1]);
  }
}

void SpectralWorkspace::inverse_trace(const std::vector<cplx>& spec, TraceField& bot,
                                      TraceField& top) const {
  auto& im = *impl_;
  for (int k = 0; k < im.nm; ++k) {
    im.ctr[k][0] = spec[2 * k].real();
    im.ctr[k][1] = spec[2 * k].imag();
    im.ctr[im.nm + k][0] = spec[2 * k + 1].real();
    im.ctr[im.nm + k][1] = spec[2 * k + 1].imag();
  }
  fftw_execute(im.bwd_tr);
  bot.nx = top.nx = im.nx;
  bot.circle = Circle::bottom;
  top.circle = Circle::top;
  bot.v.resize(im.nx);
  top.v.resize(im.nx);
  const double scale = 1.0 / g_.nx;
  for (int i = 0; i < im.nx; ++i) {
    bot.v[i] = im.rtr[i] * scale;
    top.v[i] = im.rtr[im.nx + i] * scale;
  }
}

BandedMatrix assemble_mode_system(int k, const Grid& g, double dt, double kappa,
                                  double alpha, double s_bulk, double s_surf,
                                  bool factor) {
  if (!(dt > 0.0)) throw std::invalid_argument("assemble_mode_system: dt must be > 0");
  const int ny = g.ny;
  const int n = 2 * (ny + 1) + 2;
  const double lam = mode_lambda(k, g);
  const double dy = g.dy;
  const double inv_dy = 1.0 / dy;
  const double sb = s_bulk + alpha / dt;
  const double ss = s_surf + alpha / dt;
  const auto cphi = [](int j) { return 1 + 2 * j; };
  const auto cmu = [](int j) { return 2 + 2 * j; };
  const int cgb = 0, cgt = n - 1;

  BandedMatrix A(n, 3, 3);

  // trace rows: dpsi + dt*lambda*muG = 0
  A.at(0, cphi(0)) = 1.0;
  A.at(0, cgb) = dt * lam;
  A.at(n - 1, cphi(ny)) = 1.0;
  A.at(n - 1, cgt) = dt * lam;

  for (int j = 0; j <= ny; ++j) {
    const double w = g.wy(j);
    // flux row: w*dy*dphi_j + dt*(lambda*w*dy*mu_j + (T mu)_j) = 0
    const int rf = 1 + 2 * j;
    A.at(rf, cphi(j)) = w * dy;
    double tdiag = (j == 0 || j == ny) ? inv_dy : 2.0 * inv_dy;
    A.at(rf, cmu(j)) = dt * (lam * w * dy + tdiag);
    if (j > 0) A.at(rf, cmu(j - 1)) = -dt * inv_dy;
    if (j < ny) A.at(rf, cmu(j + 1)) = -dt * inv_dy;

    // weak row: stiffness + stabilization on dphi, minus the potentials
    const int rw = 2 + 2 * j;
    if (j > 0) A.at(rw, cphi(j - 1)) = -inv_dy;
    if (j < ny) A.at(rw, cphi(j + 1)) = -inv_dy;
    if (j == 0 || j == ny) {
      A.at(rw, cphi(j)) = lam * 0.5 * dy + inv_dy + kappa * lam + 1.0 +
                          sb * 0.5 * dy + ss;
      A.at(rw, cmu(j)) = -0.5 * dy;
      A.at(rw, j == 0 ? cgb : cgt) = -1.0;
    } else {
      A.at(rw, cphi(j)) = lam * dy + 2.0 * inv_dy + sb * dy;
      A.at(rw, cmu(j)) = -dy;
    }
  }
  if (factor) A.factor();
  return A;
}

BandedMatrix assemble_elliptic_mode(int k, const Grid& g, double kappa, bool factor) {
  const int ny = g.ny;
  const double lam = mode_lambda(k, g);
  const double dy = g.dy, inv_dy = 1.0 / dy;
  BandedMatrix A(ny + 1, 1, 1);
  for (int j = 1; j < ny; ++j) {
    A.at(j, j - 1) = -inv_dy;
    A.at(j, j) = lam * dy + 2.0 * inv_dy;
    A.at(j, j + 1) = -inv_dy;
  }
  A.at(0, 0) = lam * 0.5 * dy + inv_dy + kappa * lam + 1.0;
  A.at(0, 1) = -inv_dy;
  A.at(ny, ny) = lam * 0.5 * dy + inv_dy + kappa * lam + 1.0;
  A.at(ny, ny - 1) = -inv_dy;
  if (factor) A.factor();
  return A;
}

BulkField solve_elliptic(const BulkField& h1, const TraceField& h2_bot,
                         const TraceField& h2_top, double kappa, const Grid& g) {
  SpectralWorkspace ws(g);
  std::vector<cplx> h1s, h2s;
  ws.forward(h1, h1s);
  ws.forward_trace(h2_bot, h2_top, h2s);
  const int nr = g.ny + 1;
  std::vector<cplx> sol(h1s.size());

#pragma omp parallel for schedule(static)
  for (int k = 0; k < ws.n_modes(); ++k) {
    BandedMatrix A = assemble_elliptic_mode(k, g, kappa);
    std::vector<cplx> rhs(nr);
    for (int j = 0; j <= g.ny; ++j)
      rhs[j] = g.wy(j) * g.dy * h1s[static_cast<std::size_t>(k) * nr + j];
    rhs[0] += h2s[2 * k];
    rhs[g.ny] += h2s[2 * k + 1];
    A.solve(rhs.data());
    for (int j = 0; j <= g.ny; ++j) sol[static_cast<std::size_t>(k) * nr + j] = rhs[j];
  }

  BulkField out;
  ws.inverse(sol, out);
  return out;
}

double hminus1_seminorm(const BulkField& f, const Grid& g) {
  BulkField ff = f;
  const double mean = bulk_mean(ff, g);
  for (double& v : ff.v) v -= mean;

  SpectralWorkspace ws(g);
  std::vector<cplx> fs;
  ws.forward(ff, fs);
  const int nr = g.ny + 1;
  std::vector<cplx> us(fs.size());

#pragma omp parallel for schedule(static)
  for (int k = 0; k < ws.n_modes(); ++k) {
    const int ny = g.ny;
    const double lam = mode_lambda(k, g);
    const double dy = g.dy, inv_dy = 1.0 / dy;
    BandedMatrix A(ny + 1, 1, 1);
    for (int j = 1; j < ny; ++j) {
      A.at(j, j - 1) = -inv_dy;
      A.at(j, j) = lam * dy + 2.0 * inv_dy;
      A.at(j, j + 1) = -inv_dy;
    }
    A.at(0, 0) = lam * 0.5 * dy + inv_dy;
    A.at(0, 1) = -inv_dy;
    A.at(ny, ny) = lam * 0.5 * dy + inv_dy;
    A.at(ny, ny - 1) = -inv_dy;

    std::vector<cplx> rhs(nr);
    for (int j = 0; j <= ny; ++j)
      rhs[j] = g.wy(j) * dy * fs[static_cast<std::size_t>(k) * nr + j];
    if (k == 0) {
      // Neumann kernel: pin u_0 = 0; the dropped row is implied by the
      // compatibility the mean removal just enforced.
      A.at(0, 0) = 1.0;
      A.at(0, 1) = 0.0;
      rhs[0] = 0.0;
    }
    A.factor();
    A.solve(rhs.data());
    for (int j = 0; j <= ny; ++j) us[static_cast<std::size_t>(k) * nr + j] = rhs[j];
  }

  BulkField u;
  ws.inverse(us, u);
  const double nrm2 = bulk_inner(ff, u, g);
  return std::sqrt(std::max(nrm2, 0.0));
}

}  // namespace chdbc
