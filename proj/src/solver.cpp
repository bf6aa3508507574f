#include "chdbc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chdbc {

void validate(const SolverParams& p) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("solver: dt must be > 0");
  if (p.kappa < 0.0) throw std::invalid_argument("solver: kappa must be >= 0");
  if (p.alpha < 0.0) throw std::invalid_argument("solver: alpha must be >= 0");
  if (p.s_bulk < 0.0 || p.s_surf < 0.0)
    throw std::invalid_argument("solver: stabilization must be >= 0");
  if (!(p.max_energy_uptick > 0.0))
    throw std::invalid_argument("solver: max_energy_uptick must be > 0");
  if (p.max_halvings < 0) throw std::invalid_argument("solver: max_halvings < 0");
}

struct Stepper::Bank {
  std::vector<BandedMatrix> raw, lu;
};

Stepper::Stepper(const Grid& g, const Potential& F, const Potential& G, SolverParams p)
    : g_(g), f_(F), gpot_(G), p_(p), ws_(g) {
  validate(p_);
}

Stepper::~Stepper() = default;

const Stepper::Bank& Stepper::bank_for(double dt) {
  auto it = banks_.find(dt);
  if (it != banks_.end()) return *it->second;
  auto b = std::make_unique<Bank>();
  const int nm = ws_.n_modes();
  b->raw.resize(nm);
  b->lu.resize(nm);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nm; ++k) {
    b->raw[k] = assemble_mode_system(k, g_, dt, p_.kappa, p_.alpha, p_.s_bulk,
                                     p_.s_surf, false);
    b->lu[k] = b->raw[k];
    b->lu[k].factor();
  }
  auto& slot = banks_[dt];  // at most max_halvings + 1 distinct dts ever
  slot = std::move(b);
  return *slot;
}

double Stepper::attempt(const State& s, double dt, State& out, ChemPotentials& pots,
                        double& residual) {
  const Bank& bank = bank_for(dt);
  const int ny = g_.ny, nr = ny + 1, nm = ws_.n_modes();
  const double dy = g_.dy, inv_dy = 1.0 / dy;
  const double kap = p_.kappa;

  BulkField fprime(g_);
  for (std::size_t idx = 0; idx < fprime.v.size(); ++idx)
    fprime.v[idx] = f_.d1(s.phi.v[idx]);
  TraceField gb(g_, Circle::bottom), gt(g_, Circle::top);
  for (int i = 0; i < g_.nx; ++i) {
    gb[i] = gpot_.d1(s.phi(i, 0));
    gt[i] = gpot_.d1(s.phi(i, ny));
  }

  std::vector<cplx> sp_phi, sp_fp, sp_gp;
  ws_.forward(s.phi, sp_phi);
  ws_.forward(fprime, sp_fp);
  ws_.forward_trace(gb, gt, sp_gp);

  std::vector<cplx> sp_dphi(static_cast<std::size_t>(nm) * nr);
  std::vector<cplx> sp_mu(static_cast<std::size_t>(nm) * nr);
  std::vector<cplx> sp_mug(2 * static_cast<std::size_t>(nm));
  std::vector<double> mode_res(nm, 0.0);

#pragma omp parallel for schedule(static)
  for (int k = 0; k < nm; ++k) {
    const double lam = mode_lambda(k, g_);
    const int n = 2 * nr + 2;
    const cplx* ph = &sp_phi[static_cast<std::size_t>(k) * nr];
    const cplx* fp = &sp_fp[static_cast<std::size_t>(k) * nr];
    std::vector<cplx> rhs(n, cplx(0.0, 0.0));
    for (int j = 0; j <= ny; ++j) {
      cplx tphi;  // (T phi^n)_j, the y-stiffness action
      if (j == 0)
        tphi = (ph[0] - ph[1]) * inv_dy;
      else if (j == ny)
        tphi = (ph[ny] - ph[ny - 1]) * inv_dy;
      else
        tphi = (2.0 * ph[j] - ph[j - 1] - ph[j + 1]) * inv_dy;
      const int rw = 2 + 2 * j;
      if (j == 0 || j == ny) {
        const cplx gp = sp_gp[2 * k + (j == 0 ? 0 : 1)];
        rhs[rw] = -0.5 * dy * fp[j] - gp -
                  ((lam * 0.5 * dy + kap * lam + 1.0) * ph[j] + tphi);
      } else {
        rhs[rw] = -dy * fp[j] - (lam * dy * ph[j] + tphi);
      }
    }

    std::vector<cplx> u = rhs;
    bank.lu[k].solve(u.data());

    // banded residual against the unfactored matrix, relative to the RHS
    std::vector<cplx> au(n);
    bank.raw[k].apply(u.data(), au.data());
    double rmax = 0.0, bmax = 0.0;
    for (int r = 0; r < n; ++r) {
      rmax = std::max(rmax, std::abs(au[r] - rhs[r]));
      bmax = std::max(bmax, std::abs(rhs[r]));
    }
    mode_res[k] = rmax / (1.0 + bmax);

    if (k == 0 && p_.pin_conserved) {
      // trace means and bulk mass are exact invariants of the k = 0 block;
      // re-pin them so LU round-off cannot leak into the conserved components
      u[1] = 0.0;
      u[1 + 2 * ny] = 0.0;
      cplx defect = 0.0;
      for (int j = 0; j <= ny; ++j) defect += g_.wy(j) * dy * u[1 + 2 * j];
      const cplx fix = defect / ((ny - 1) * dy);
      for (int j = 1; j < ny; ++j) u[1 + 2 * j] -= fix;
    }

    cplx* dp = &sp_dphi[static_cast<std::size_t>(k) * nr];
    cplx* mu = &sp_mu[static_cast<std::size_t>(k) * nr];
    for (int j = 0; j <= ny; ++j) {
      dp[j] = u[1 + 2 * j];
      mu[j] = u[2 + 2 * j];
    }
    sp_mug[2 * k] = u[0];
    sp_mug[2 * k + 1] = u[n - 1];
  }

  residual = *std::max_element(mode_res.begin(), mode_res.end());

  BulkField dphi;
  ws_.inverse(sp_dphi, dphi);
  ws_.inverse(sp_mu, pots.mu);
  ws_.inverse_trace(sp_mug, pots.mu_bot, pots.mu_top);

  out = s;
  for (std::size_t idx = 0; idx < out.phi.v.size(); ++idx)
    out.phi.v[idx] += dphi.v[idx];
  out.time = s.time + dt;
  return bulk_inner(dphi, dphi, g_) +
         surface_inner(trace(dphi, g_, Circle::bottom), trace(dphi, g_, Circle::bottom), g_) +
         surface_inner(trace(dphi, g_, Circle::top), trace(dphi, g_, Circle::top), g_);
}

StepReport Stepper::step(State& s) {
  if (!have_energy_) {
    energy_cache_ = total_energy(s, f_, gpot_, p_.kappa, g_).e_total;
    have_energy_ = true;
  }
  const double e_before = energy_cache_;
  const double tol = p_.max_energy_uptick * (1.0 + std::abs(e_before));

  StepReport rep;
  rep.energy_before = e_before;
  double dt = p_.dt;
  State out;
  ChemPotentials pots;
  for (int h = 0;; ++h) {
    double residual = 0.0;
    const double incr2 = attempt(s, dt, out, pots, residual);
    const double e_after = total_energy(out, f_, gpot_, p_.kappa, g_).e_total;
    if (e_after - e_before <= tol) {
      rep.dt_accepted = dt;
      rep.halvings = h;
      rep.energy_after = e_after;
      rep.solve_residual = residual;
      rep.d_visc = (p_.alpha > 0.0) ? p_.alpha * incr2 / (dt * dt) : 0.0;
      break;
    }
    if (h == p_.max_halvings)
      throw std::runtime_error("step: energy uptick persists after " +
                               std::to_string(p_.max_halvings) + " dt halvings");
    dt *= 0.5;
  }
  const Dissipation d = dissipation(pots, g_);
  rep.d_bulk = d.d_bulk;
  rep.d_surf = d.d_surf;
  pots_ = std::move(pots);
  s = std::move(out);
  energy_cache_ = rep.energy_after;
  return rep;
}

StepReport step(State& s, const SolverParams& p, const Potential& F,
                const Potential& G, const Grid& g) {
  Stepper st(g, F, G, p);
  return st.step(s);
}

namespace {

EnergyReport merge_report(const State& s, const Potential& F, const Potential& G,
                          const SolverParams& p, const Grid& g, const StepReport& rep) {
  EnergyReport er = total_energy(s, F, G, p.kappa, g);
  er.d_bulk = rep.d_bulk;
  er.d_surf = rep.d_surf;
  er.d_visc = rep.d_visc;
  return er;
}

}  // namespace

Trajectory run(const State& s0, const SolverParams& p, const Potential& F,
               const Potential& G, const Grid& g, const RunOptions& opt) {
  validate(p);
  if (opt.report_every < 1) throw std::invalid_argument("run: report_every must be >= 1");
  if (!(opt.t_end >= s0.time)) throw std::invalid_argument("run: t_end before start time");

  Trajectory tr;
  tr.dt_nominal = p.dt;
  Stepper st(g, F, G, p);
  State s = s0;

  {
    // initial record: energies/masses plus the instantaneous dissipation
    EnergyReport er = total_energy(s, F, G, p.kappa, g);
    const ChemPotentials c0 = chemical_potentials(s, s, F, G, p.kappa, 0.0, 1.0, g);
    const Dissipation d0 = dissipation(c0, g);
    er.d_bulk = d0.d_bulk;
    er.d_surf = d0.d_surf;
    tr.reports.push_back(er);
  }
  if (opt.snapshot_every > 0) {
    tr.snapshots.push_back(s);
    tr.snapshot_times.push_back(s.time);
  }

  long steps = 0;
  bool recorded_last = true;
  while (s.time + 0.5 * p.dt < opt.t_end && steps < opt.max_steps) {
    const StepReport rep = st.step(s);
    ++steps;
    tr.total_halvings += rep.halvings;
    recorded_last = false;

    if (steps % opt.report_every == 0) {
      tr.reports.push_back(merge_report(s, F, G, p, g, rep));
      recorded_last = true;
    }
    if (opt.snapshot_every > 0 && steps % opt.snapshot_every == 0) {
      tr.snapshots.push_back(s);
      tr.snapshot_times.push_back(s.time);
    }
    if (opt.observer) opt.observer(s, rep);

    if (opt.stop_when && opt.stop_when(s, rep)) {
      if (!recorded_last) {
        tr.reports.push_back(merge_report(s, F, G, p, g, rep));
        recorded_last = true;
      }
      break;
    }
    if (opt.equilibrium_tol > 0.0 &&
        std::sqrt(rep.d_bulk) + std::sqrt(rep.d_surf) < opt.equilibrium_tol) {
      tr.reached_equilibrium = true;
      if (!recorded_last) {
        tr.reports.push_back(merge_report(s, F, G, p, g, rep));
        recorded_last = true;
      }
      break;
    }
    if (!recorded_last && !(s.time + 0.5 * p.dt < opt.t_end && steps < opt.max_steps)) {
      tr.reports.push_back(merge_report(s, F, G, p, g, rep));
      recorded_last = true;
    }
  }

  if (opt.snapshot_every > 0 &&
      (tr.snapshot_times.empty() || tr.snapshot_times.back() != s.time)) {
    tr.snapshots.push_back(s);
    tr.snapshot_times.push_back(s.time);
  }
  tr.final_state = std::move(s);
  tr.steps_taken = static_cast<int>(steps);
  return tr;
}

}  // namespace chdbc
