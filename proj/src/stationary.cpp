#include "chdbc/stationary.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chdbc/init.hpp"

namespace chdbc {

namespace {

inline int nid(const Grid& g, int i, int j) { return j * g.nx + i; }

// Weak-form stationary rows, one per node, common dx factor divided out:
//   interior: dy (-Dxx f) + (T f)_j + dy F'(f) - l1 dy
//   boundary: dy/2 (-Dxx f) + (T f) + kappa (-Dxx f) + f + dy/2 F'(f) + G'(f)
//             - l1 dy/2 - l2
// (T f)_0 = (f_0 - f_1)/dy etc. is the lumped y-stiffness.
std::vector<double> weak_residual(const BulkField& f, double l1, double l2,
                                  const Potential& F, const Potential& G,
                                  double kappa, const Grid& g) {
  const int nx = g.nx, ny = g.ny;
  const double dy = g.dy, ix2 = 1.0 / (g.dx * g.dx);
  std::vector<double> r(g.n_nodes());
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int il = (i + nx - 1) % nx, ir = (i + 1) % nx;
      const double dxx = (2.0 * f(i, j) - f(il, j) - f(ir, j)) * ix2;
      double ty;
      if (j == 0)
        ty = (f(i, 0) - f(i, 1)) / dy;
      else if (j == ny)
        ty = (f(i, ny) - f(i, ny - 1)) / dy;
      else
        ty = (2.0 * f(i, j) - f(i, j - 1) - f(i, j + 1)) / dy;
      if (j == 0 || j == ny)
        r[nid(g, i, j)] = 0.5 * dy * dxx + ty + kappa * dxx + f(i, j) +
                          0.5 * dy * F.d1(f(i, j)) + G.d1(f(i, j)) -
                          0.5 * dy * l1 - l2;
      else
        r[nid(g, i, j)] = dy * dxx + ty + dy * F.d1(f(i, j)) - dy * l1;
    }
  return r;
}

struct ScaledResidual {
  double bulk = 0.0, surf = 0.0;
  double merit() const { return std::max(bulk, surf); }
};

ScaledResidual scale_residual(const std::vector<double>& r, const Grid& g) {
  ScaledResidual out;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double a = std::abs(r[nid(g, i, j)]);
      if (j == 0 || j == g.ny)
        out.surf = std::max(out.surf, a);
      else
        out.bulk = std::max(out.bulk, a / g.dy);
    }
  return out;
}

void project_masses(State& s, double m_bulk, double m_surf, const Grid& g) {
  const TraceField b = trace(s.phi, g, Circle::bottom), t = trace(s.phi, g, Circle::top);
  const double vs = m_surf - surface_mean_total(b, t, g);
  for (int i = 0; i < g.nx; ++i) {
    s.phi(i, 0) += vs;
    s.phi(i, g.ny) += vs;
  }
  const double vb = (m_bulk - bulk_mean(s.phi, g)) * g.ny / (g.ny - 1.0);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s.phi(i, j) += vb;
}

}  // namespace

std::pair<double, double> multipliers(const State& s, const Potential& F,
                                      const Potential& G, double kappa,
                                      const Grid& g) {
  (void)kappa;  // the kappa term averages to zero exactly on a circle
  const int nx = g.nx, ny = g.ny;
  const double dy = g.dy, ix2 = 1.0 / (g.dx * g.dx);

  // lambda-free part of the discrete normal flux the boundary rows carry:
  //   q~_i = dy/2 [(-Dxx psi)_i + F'(psi_i)] + (psi_i - phi_inner_i)/dy
  double qsum = 0.0, psum = 0.0, gsum = 0.0;
  for (const int j : {0, ny}) {
    const int jin = (j == 0) ? 1 : ny - 1;
    for (int i = 0; i < nx; ++i) {
      const int il = (i + nx - 1) % nx, ir = (i + 1) % nx;
      const double p = s.phi(i, j);
      const double dxx = (2.0 * p - s.phi(il, j) - s.phi(ir, j)) * ix2;
      qsum += 0.5 * dy * (dxx + F.d1(p)) + (p - s.phi(i, jin)) / dy;
      psum += p;
      gsum += G.d1(p);
    }
  }
  const double qt = qsum / (2 * nx), pm = psum / (2 * nx), gm = gsum / (2 * nx);

  BulkField fp(g);
  for (std::size_t idx = 0; idx < fp.v.size(); ++idx) fp.v[idx] = F.d1(s.phi.v[idx]);
  const double fmean = bulk_mean(fp, g);

  const double ratio = g.surface_len() / g.area();
  const double l1 = (fmean - ratio * qt) / (1.0 - ratio * 0.5 * dy);
  const double l2 = (qt - 0.5 * dy * l1) + pm + gm;
  return {l1, l2};
}

MassSystemMultipliers multipliers_from_mass_system(const State& s, const Potential& F,
                                                   const Potential& G, double kappa,
                                                   const Grid& g) {
  const TraceField pb = trace(s.phi, g, Circle::bottom), pt = trace(s.phi, g, Circle::top);
  TraceField gb(g, Circle::bottom), gt(g, Circle::top);
  for (int i = 0; i < g.nx; ++i) {
    gb[i] = G.d1(pb[i]);
    gt[i] = G.d1(pt[i]);
  }
  BulkField fp(g);
  for (std::size_t idx = 0; idx < fp.v.size(); ++idx) fp.v[idx] = F.d1(s.phi.v[idx]);

  TraceField one_b(g, Circle::bottom, 1.0), one_t(g, Circle::top, 1.0);
  BulkField one(g, 1.0);
  const double l1_rhs = bulk_inner(fp, one, g) + surface_inner(pb, one_b, g) +
                        surface_inner(pt, one_t, g) + surface_inner(gb, one_b, g) +
                        surface_inner(gt, one_t, g);
  const double l2_rhs = bulk_grad_norm_sq(s.phi, g) + bulk_inner(fp, s.phi, g) +
                        kappa * (surface_grad_norm_sq(pb, g) + surface_grad_norm_sq(pt, g)) +
                        surface_inner(pb, pb, g) + surface_inner(pt, pt, g) +
                        surface_inner(gb, pb, g) + surface_inner(gt, pt, g);

  const double a = bulk_mean(s.phi, g);
  const double b = surface_mean_total(pb, pt, g);
  MassSystemMultipliers out;
  if (std::abs(b - a) <= 1e-12 * (std::abs(a) + std::abs(b) + 1.0)) {
    out.degenerate = true;
    out.compatibility_gap = std::abs(l2_rhs - l1_rhs * a);
    return out;
  }
  // [1 1; a b] diag(|O|,|G|) x = rhs  =>  Cramer on the 2x2
  const double A = g.area(), L = g.surface_len();
  const double det = A * L * (b - a);
  out.lambda1 = (l1_rhs * b * L - l2_rhs * L) / det;
  out.lambda2 = (l2_rhs * A - l1_rhs * a * A) / det;
  return out;
}

StationaryResult solve_stationary(const State& init, double m_bulk, double m_surf,
                                  const Potential& F, const Potential& G,
                                  const StationaryParams& sp, const Grid& g) {
  if (!(sp.tol > 0.0)) throw std::invalid_argument("solve_stationary: tol must be > 0");
  if (sp.kappa < 0.0) throw std::invalid_argument("solve_stationary: kappa must be >= 0");
  if (init.phi.nx != g.nx || init.phi.ny != g.ny)
    throw std::invalid_argument("solve_stationary: init/grid shape mismatch");

  StationaryResult res;
  res.state = init;
  res.state.time = 0.0;
  project_masses(res.state, m_bulk, m_surf, g);

  auto [l1, l2] = multipliers(res.state, F, G, sp.kappa, g);
  {
    const auto r = weak_residual(res.state.phi, l1, l2, F, G, sp.kappa, g);
    const auto sc = scale_residual(r, g);
    if (sc.merit() <= sp.tol) {
      res.lambda1 = l1;
      res.lambda2 = l2;
      res.residual_bulk = sc.bulk;
      res.residual_surf = sc.surf;
      res.converged = true;
      return res;
    }
  }

  // phase (i): pseudo-time gradient flow down to a rough equilibrium
  {
    SolverParams p;
    p.dt = sp.pseudo_dt;
    p.kappa = sp.kappa;
    p.alpha = 0.0;
    p.s_bulk = sp.s_bulk;
    p.s_surf = sp.s_surf;
    RunOptions opt;
    opt.t_end = 1e12;
    opt.max_steps = sp.max_pseudo_steps;
    opt.report_every = 1000;
    opt.equilibrium_tol = sp.pre_tol;
    Trajectory tr = run(res.state, p, F, G, g, opt);
    res.state = tr.final_state;
    res.pseudo_steps = tr.steps_taken;
    std::tie(l1, l2) = multipliers(res.state, F, G, sp.kappa, g);
  }

  // phase (ii): damped Newton on the dense KKT system
  const int nx = g.nx, ny = g.ny;
  const int N = static_cast<int>(g.n_nodes()), M = N + 2;
  const double dy = g.dy, ix2 = 1.0 / (g.dx * g.dx);
  const double mb_target = m_bulk * nx * g.ly;  // sum w_j dy phi over nodes
  const double ms_target = m_surf * 2 * nx;

  std::vector<double> J(static_cast<std::size_t>(M) * M);
  std::vector<double> rhs(M), r(N);
  std::vector<int> ipiv(M);
  auto at = [&](int row, int col) -> double& {
    return J[static_cast<std::size_t>(col) * M + row];  // column-major
  };

  auto merit_of = [&](const BulkField& f, double a1, double a2) {
    const auto rr = weak_residual(f, a1, a2, F, G, sp.kappa, g);
    double c1 = -mb_target, c2 = -ms_target;
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i < nx; ++i) c1 += g.wy(j) * dy * f(i, j);
    for (int i = 0; i < nx; ++i) c2 += f(i, 0) + f(i, ny);
    auto sc = scale_residual(rr, g);
    return std::max(sc.merit(),
                    std::max(std::abs(c1) / (nx * g.ly), std::abs(c2) / (2 * nx)));
  };

  double merit = merit_of(res.state.phi, l1, l2);
  int iter = 0;
  bool stalled = false;
  while (merit > sp.tol && iter < sp.max_iter && !stalled) {
    const BulkField& f = res.state.phi;
    r = weak_residual(f, l1, l2, F, G, sp.kappa, g);
    std::fill(J.begin(), J.end(), 0.0);
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int row = nid(g, i, j);
        const int il = (i + nx - 1) % nx, ir = (i + 1) % nx;
        const bool bd = (j == 0 || j == ny);
        const double wrow = g.wy(j) * dy;
        double xcoef = wrow;  // weight on the (-Dxx) block in this row
        if (bd) xcoef += sp.kappa;
        at(row, row) += 2.0 * xcoef * ix2;
        at(row, nid(g, il, j)) -= xcoef * ix2;
        at(row, nid(g, ir, j)) -= xcoef * ix2;
        if (j == 0) {
          at(row, row) += 1.0 / dy;
          at(row, nid(g, i, 1)) -= 1.0 / dy;
        } else if (j == ny) {
          at(row, row) += 1.0 / dy;
          at(row, nid(g, i, ny - 1)) -= 1.0 / dy;
        } else {
          at(row, row) += 2.0 / dy;
          at(row, nid(g, i, j - 1)) -= 1.0 / dy;
          at(row, nid(g, i, j + 1)) -= 1.0 / dy;
        }
        at(row, row) += wrow * F.d2(f(i, j));
        if (bd) at(row, row) += 1.0 + G.d2(f(i, j));
        at(row, N) = -wrow;
        at(N, row) = wrow;
        if (bd) {
          at(row, N + 1) = -1.0;
          at(N + 1, row) = 1.0;
        }
        rhs[row] = -r[row];
      }
    double c1 = -mb_target, c2 = -ms_target;
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i < nx; ++i) c1 += g.wy(j) * dy * f(i, j);
    for (int i = 0; i < nx; ++i) c2 += f(i, 0) + f(i, ny);
    rhs[N] = -c1;
    rhs[N + 1] = -c2;

    const int info = LAPACKE_dgesv(LAPACK_COL_MAJOR, M, 1, J.data(), M, ipiv.data(),
                                   rhs.data(), M);
    if (info != 0) {
      stalled = true;  // singular KKT matrix (non-isolated equilibrium)
      break;
    }

    double sigma = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= sp.max_backtracks; ++bt) {
      BulkField ftrial = f;
      for (int idx = 0; idx < N; ++idx) ftrial.v[idx] += sigma * rhs[idx];
      const double t1 = l1 + sigma * rhs[N], t2 = l2 + sigma * rhs[N + 1];
      const double mtrial = merit_of(ftrial, t1, t2);
      if (mtrial < merit * (1.0 - 1e-4 * sigma)) {
        res.state.phi = std::move(ftrial);
        l1 = t1;
        l2 = t2;
        merit = mtrial;
        accepted = true;
        break;
      }
      sigma *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    ++iter;
  }

  res.lambda1 = l1;
  res.lambda2 = l2;
  res.iterations = iter;
  const auto sc =
      scale_residual(weak_residual(res.state.phi, l1, l2, F, G, sp.kappa, g), g);
  res.residual_bulk = sc.bulk;
  res.residual_surf = sc.surf;
  res.converged = (merit <= sp.tol);
  return res;
}

StabilityVerdict stability_probe(const StationaryResult& r, int n, double eps,
                                 double t_probe, const SolverParams& p,
                                 const Potential& F, const Potential& G,
                                 const Grid& g, std::uint64_t seed,
                                 double escape_factor) {
  if (!r.converged) throw std::invalid_argument("stability_probe: result not converged");
  if (n < 1) throw std::invalid_argument("stability_probe: need n >= 1 trials");
  if (eps < 0.0) throw std::invalid_argument("stability_probe: eps must be >= 0");

  const double e_star = total_energy(r.state, F, G, p.kappa, g).e_total;
  const double escape_r = escape_factor * eps;
  std::vector<double> excursion(n, 0.0), e_final(n, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < n; ++trial) {
    State s0 = r.state;
    s0.time = 0.0;
    if (eps > 0.0) {
      const BulkField noise =
          mass_neutral_noise(g, splitmix64(seed ^ (0xC2B2AE3D27D4EB4Full * (trial + 1))));
      State probe = s0;
      add_scaled(probe, noise, 1.0);
      const double nrm = state_distance(probe, s0, g);
      add_scaled(s0, noise, eps / nrm);
    }
    double exc = 0.0;
    RunOptions opt;
    opt.t_end = t_probe;
    opt.report_every = 1 << 20;
    opt.observer = [&](const State& s, const StepReport&) {
      exc = std::max(exc, state_distance(s, r.state, g));
    };
    if (eps > 0.0 && escape_r > 0.0)
      opt.stop_when = [&](const State&, const StepReport&) { return exc > escape_r; };
    const Trajectory tr = run(s0, p, F, G, g, opt);
    excursion[trial] = exc;
    e_final[trial] = total_energy(tr.final_state, F, G, p.kappa, g).e_total;
  }

  StabilityVerdict v;
  v.n_trials = n;
  v.max_excursion = *std::max_element(excursion.begin(), excursion.end());
  v.escaped = (escape_r > 0.0) && (v.max_excursion > escape_r);
  v.energy_comparison = *std::min_element(e_final.begin(), e_final.end()) - e_star;
  return v;
}

}  // namespace chdbc
