#include "chdbc/diagnostics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chdbc/spectral.hpp"

namespace chdbc {

ConservationReport check_conservation(const Trajectory& tr, double tol) {
  if (tr.reports.empty()) throw std::invalid_argument("check_conservation: empty trajectory");
  ConservationReport rep;
  rep.tol = tol;
  const EnergyReport& r0 = tr.reports.front();
  double worst = -1.0;
  for (std::size_t i = 0; i < tr.reports.size(); ++i) {
    const EnergyReport& r = tr.reports[i];
    const double db = std::abs(r.m_bulk - r0.m_bulk);
    const double dbo = std::abs(r.m_bot - r0.m_bot);
    const double dto = std::abs(r.m_top - r0.m_top);
    rep.drift_bulk = std::max(rep.drift_bulk, db);
    rep.drift_bot = std::max(rep.drift_bot, dbo);
    rep.drift_top = std::max(rep.drift_top, dto);
    const double here = std::max({db, dbo, dto});
    if (here > worst) {
      worst = here;
      rep.worst_index = static_cast<int>(i);
    }
  }
  rep.pass = rep.drift_bulk <= tol && rep.drift_bot <= tol && rep.drift_top <= tol;
  return rep;
}

EnergyLawReport check_energy_law(const Trajectory& tr, double uptick_tol) {
  if (tr.reports.size() < 2)
    throw std::invalid_argument("check_energy_law: need at least two reports");
  EnergyLawReport rep;
  rep.monotone = true;
  rep.visc_nonneg = true;
  double defect_sum = 0.0;
  int n = 0;
  for (std::size_t i = 1; i < tr.reports.size(); ++i) {
    const EnergyReport& a = tr.reports[i - 1];
    const EnergyReport& b = tr.reports[i];
    const double dts = b.time - a.time;
    const double uptick = b.e_total - a.e_total;
    const double rel = uptick / (1.0 + std::abs(a.e_total));
    rep.max_uptick_rel = std::max(rep.max_uptick_rel, rel);
    if (rel > uptick_tol) {
      rep.monotone = false;
      ++rep.n_upticks;
    }
    if (b.d_visc < 0.0) rep.visc_nonneg = false;
    const double defect =
        std::abs(uptick / dts + b.d_bulk + b.d_surf + b.d_visc);
    rep.max_defect = std::max(rep.max_defect, defect);
    defect_sum += defect;
    ++n;
  }
  rep.mean_defect = defect_sum / n;
  rep.pass = rep.monotone && rep.visc_nonneg;
  return rep;
}

double mean_defect(const Trajectory& tr, double t_lo, double t_hi) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 1; i < tr.reports.size(); ++i) {
    const EnergyReport& a = tr.reports[i - 1];
    const EnergyReport& b = tr.reports[i];
    if (b.time < t_lo || b.time > t_hi) continue;
    sum += std::abs((b.e_total - a.e_total) / (b.time - a.time) + b.d_bulk +
                    b.d_surf + b.d_visc);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("mean_defect: window contains no steps");
  return sum / n;
}

std::vector<double> defect_ratios(const std::vector<Trajectory>& runs, double t_lo,
                                  double t_hi) {
  if (runs.size() < 2) throw std::invalid_argument("defect_ratios: need >= 2 runs");
  std::vector<double> out;
  for (std::size_t l = 0; l + 1 < runs.size(); ++l)
    out.push_back(mean_defect(runs[l], t_lo, t_hi) /
                  mean_defect(runs[l + 1], t_lo, t_hi));
  return out;
}

namespace {

struct LsqLine {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LsqLine lsq(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LsqLine l;
  const double denom = n * sxx - sx * sx;
  l.slope = (n * sxy - sx * sy) / denom;
  l.intercept = (sy - l.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    ss += r * r;
  }
  l.rms = std::sqrt(ss / n);
  return l;
}

}  // namespace

RateFit fit_decay_rate(const std::vector<double>& times,
                       const std::vector<double>& gaps) {
  if (times.size() != gaps.size())
    throw std::invalid_argument("fit_decay_rate: times/gaps size mismatch");
  std::vector<double> t, lg;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] > 0.0) {
      t.push_back(times[i]);
      lg.push_back(std::log(gaps[i]));
    }
  RateFit fit;
  if (t.size() < 3) return fit;  // nothing usable; decaying stays false
  const double first = std::exp(lg.front()), last = std::exp(lg.back());
  if (!(last <= 0.5 * first)) return fit;  // flat or growing tail

  std::vector<double> lt(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) lt[i] = std::log1p(t[i]);
  const LsqLine pw = lsq(lt, lg);
  const LsqLine ex = lsq(t, lg);

  fit.decaying = true;
  if (pw.rms < ex.rms) {
    fit.model = RateFit::Model::power;
    fit.exponent = -pw.slope;
    fit.residual = pw.rms;
    // gap ~ (1+t)^(-1/(1-2 theta))  =>  theta = (1 - 1/exponent)/2
    fit.theta = (fit.exponent > 0.0) ? 0.5 * (1.0 - 1.0 / fit.exponent) : 0.0;
  } else {
    fit.model = RateFit::Model::exponential;
    fit.rate = -ex.slope;
    fit.residual = ex.rms;
    fit.theta = 0.5;  // exponential decay is the theta = 1/2 case
  }
  return fit;
}

double estimate_e_inf(const Trajectory& tr) {
  if (tr.reports.empty()) throw std::invalid_argument("estimate_e_inf: empty trajectory");
  const std::size_t n = tr.reports.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 20);
  double sum = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) sum += tr.reports[i].e_total;
  return sum / tail;
}

EllipticConvergence manufactured_elliptic_test(const std::vector<int>& resolutions,
                                               double kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("manufactured_elliptic_test: kappa must be > 0");
  if (resolutions.size() < 2)
    throw std::invalid_argument("manufactured_elliptic_test: need >= 2 resolutions");
  using std::numbers::pi;
  EllipticConvergence out;
  out.kappa = kappa;
  out.resolutions = resolutions;
  for (const int r : resolutions) {
    const Grid g = build_grid(r, r, 1.0, 1.0);
    BulkField exact(g), h1(g);
    TraceField h2b(g, Circle::bottom), h2t(g, Circle::top);
    const double c1 = 4.0 * pi * pi + pi * pi;          // -lap of the product
    const double cs = kappa * 4.0 * pi * pi + 1.0;      // surface symbol + mass
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double v = std::cos(2.0 * pi * g.x(i)) * std::cos(pi * g.y(j));
        exact(i, j) = v;
        h1(i, j) = c1 * v;
      }
    for (int i = 0; i < g.nx; ++i) {
      // dn phi = 0 on both circles (sin factor vanishes), so h2 is purely
      // the surface operator applied to the trace
      h2b[i] = cs * std::cos(2.0 * pi * g.x(i));
      h2t[i] = -cs * std::cos(2.0 * pi * g.x(i));
    }
    const BulkField sol = solve_elliptic(h1, h2b, h2t, kappa, g);
    double ep = 0.0, es = 0.0;
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double e = std::abs(sol(i, j) - exact(i, j));
        ep = std::max(ep, e);
        if (j == 0 || j == g.ny) es = std::max(es, e);
      }
    out.err_phi.push_back(ep);
    out.err_psi.push_back(es);
    const double load =
        std::sqrt(bulk_inner(h1, h1, g)) +
        std::sqrt(surface_inner(h2b, h2b, g) + surface_inner(h2t, h2t, g));
    out.stability_ratio.push_back(ep / load);
  }
  for (std::size_t l = 0; l + 1 < out.err_phi.size(); ++l) {
    out.order_phi.push_back(std::log2(out.err_phi[l] / out.err_phi[l + 1]));
    out.order_psi.push_back(std::log2(out.err_psi[l] / out.err_psi[l + 1]));
  }
  return out;
}

State dense_reference_step(const State& s, const SolverParams& p, const Potential& F,
                           const Potential& G, const Grid& g) {
  validate(p);
  const int nx = g.nx, ny = g.ny, N = static_cast<int>(g.n_nodes());
  const int M = 2 * N + 2 * nx;  // dphi, mu, muG_bot, muG_top
  const double dt = p.dt, dy = g.dy, ix2 = 1.0 / (g.dx * g.dx);
  const double sb = p.s_bulk + (p.alpha > 0.0 ? p.alpha / dt : 0.0);
  const double ss = p.s_surf + (p.alpha > 0.0 ? p.alpha / dt : 0.0);

  std::vector<double> A(static_cast<std::size_t>(M) * M, 0.0), rhs(M, 0.0);
  std::vector<int> ipiv(M);
  auto at = [&](int row, int col) -> double& {
    return A[static_cast<std::size_t>(col) * M + row];
  };
  auto idd = [&](int i, int j) { return j * nx + i; };          // dphi block
  auto idm = [&](int i, int j) { return N + j * nx + i; };      // mu block
  auto idg = [&](int i, int j) { return 2 * N + (j == 0 ? i : nx + i); };

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int il = (i + nx - 1) % nx, ir = (i + 1) % nx;
      const bool bd = (j == 0 || j == ny);
      const double w = g.wy(j) * dy;

      // flux row: w dphi + dt [ w (-Dxx mu) + (T mu) ] = 0
      const int rf = idd(i, j);
      at(rf, idd(i, j)) += w;
      at(rf, idm(i, j)) += dt * (2.0 * w * ix2);
      at(rf, idm(il, j)) -= dt * w * ix2;
      at(rf, idm(ir, j)) -= dt * w * ix2;
      if (j == 0) {
        at(rf, idm(i, 0)) += dt / dy;
        at(rf, idm(i, 1)) -= dt / dy;
      } else if (j == ny) {
        at(rf, idm(i, ny)) += dt / dy;
        at(rf, idm(i, ny - 1)) -= dt / dy;
      } else {
        at(rf, idm(i, j)) += dt * 2.0 / dy;
        at(rf, idm(i, j - 1)) -= dt / dy;
        at(rf, idm(i, j + 1)) -= dt / dy;
      }

      // weak row: stiffness and stabilization on dphi minus the potential row
      const int rw = idm(i, j);
      double xcoef = w;
      if (bd) xcoef += p.kappa;
      at(rw, idd(i, j)) += 2.0 * xcoef * ix2;
      at(rw, idd(il, j)) -= xcoef * ix2;
      at(rw, idd(ir, j)) -= xcoef * ix2;
      if (j == 0) {
        at(rw, idd(i, 0)) += 1.0 / dy;
        at(rw, idd(i, 1)) -= 1.0 / dy;
      } else if (j == ny) {
        at(rw, idd(i, ny)) += 1.0 / dy;
        at(rw, idd(i, ny - 1)) -= 1.0 / dy;
      } else {
        at(rw, idd(i, j)) += 2.0 / dy;
        at(rw, idd(i, j - 1)) -= 1.0 / dy;
        at(rw, idd(i, j + 1)) -= 1.0 / dy;
      }
      at(rw, idd(i, j)) += sb * w;
      at(rw, idm(i, j)) -= w;
      if (bd) {
        at(rw, idd(i, j)) += 1.0 + ss;
        at(rw, idg(i, j)) -= 1.0;
      }

      // explicit part: minus the stationary operator applied to phi^n
      const double ph = s.phi(i, j);
      const double dxx = (2.0 * ph - s.phi(il, j) - s.phi(ir, j)) * ix2;
      double ty;
      if (j == 0)
        ty = (s.phi(i, 0) - s.phi(i, 1)) / dy;
      else if (j == ny)
        ty = (s.phi(i, ny) - s.phi(i, ny - 1)) / dy;
      else
        ty = (2.0 * ph - s.phi(i, j - 1) - s.phi(i, j + 1)) / dy;
      rhs[rw] = -w * F.d1(ph) - (w * dxx + ty);
      if (bd) rhs[rw] += -G.d1(ph) - (p.kappa * dxx + ph);

      // trace row: dpsi + dt (-Dxx muG) = 0
      if (bd) {
        const int rt = idg(i, j);
        at(rt, idd(i, j)) += 1.0;
        at(rt, idg(i, j)) += dt * 2.0 * ix2;
        at(rt, idg(il, j)) -= dt * ix2;
        at(rt, idg(ir, j)) -= dt * ix2;
      }
    }

  const int info =
      LAPACKE_dgesv(LAPACK_COL_MAJOR, M, 1, A.data(), M, ipiv.data(), rhs.data(), M);
  if (info != 0)
    throw std::runtime_error("dense_reference_step: singular step system");

  State out = s;
  for (int idx = 0; idx < N; ++idx) out.phi.v[idx] += rhs[idx];
  out.time = s.time + dt;
  return out;
}

SensitivityReport perturbation_sensitivity(const Trajectory& a, const Trajectory& b,
                                           const Grid& g) {
  if (a.snapshots.empty() || b.snapshots.empty())
    throw std::invalid_argument("perturbation_sensitivity: runs carry no snapshots");
  if (a.snapshot_times.size() != b.snapshot_times.size())
    throw std::invalid_argument("perturbation_sensitivity: snapshot counts differ");
  for (std::size_t i = 0; i < a.snapshot_times.size(); ++i)
    if (std::abs(a.snapshot_times[i] - b.snapshot_times[i]) > 1e-12)
      throw std::invalid_argument("perturbation_sensitivity: snapshot times misaligned");
  const EnergyReport &ra = a.reports.front(), &rb = b.reports.front();
  const double scale = 1.0 + std::abs(ra.m_bulk) + std::abs(ra.m_bot) + std::abs(ra.m_top);
  if (std::abs(ra.m_bulk - rb.m_bulk) > 1e-10 * scale ||
      std::abs(ra.m_bot - rb.m_bot) > 1e-10 * scale ||
      std::abs(ra.m_top - rb.m_top) > 1e-10 * scale)
    throw std::invalid_argument(
        "perturbation_sensitivity: bulk/surface masses differ between runs");

  SensitivityReport rep;
  rep.times = a.snapshot_times;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    BulkField diff = a.snapshots[i].phi;
    for (std::size_t k = 0; k < diff.v.size(); ++k) diff.v[k] -= b.snapshots[i].phi.v[k];
    rep.norms.push_back(hminus1_seminorm(diff, g));
  }
  if (rep.norms.front() == 0.0) {
    rep.exact_match = true;
    rep.ratios.assign(rep.norms.size(), 1.0);
    return rep;
  }
  for (const double n : rep.norms) rep.ratios.push_back(n / rep.norms.front());
  const double total_t = rep.times.back() - rep.times.front();
  if (total_t > 0.0 && rep.ratios.back() > 0.0)
    rep.growth_rate = std::log(rep.ratios.back()) / total_t;
  return rep;
}

}  // namespace chdbc
