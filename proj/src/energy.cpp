#include "chdbc/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace chdbc {

EnergyReport total_energy(const State& s, const Potential& F, const Potential& G,
                          double kappa, const Grid& g) {
  const BulkField& phi = s.phi;
  EnergyReport r;
  r.time = s.time;

  double fint = 0.0;
  for (int j = 0; j <= g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += F.value(phi(i, j));
    fint += g.wy(j) * row;
  }
  fint *= g.dx * g.dy;
  r.e_bulk = 0.5 * bulk_grad_norm_sq(phi, g) + fint;

  const TraceField pb = trace(phi, g, Circle::bottom);
  const TraceField pt = trace(phi, g, Circle::top);
  double surf = 0.5 * kappa * (surface_grad_norm_sq(pb, g) + surface_grad_norm_sq(pt, g));
  surf += 0.5 * (surface_inner(pb, pb, g) + surface_inner(pt, pt, g));
  for (int i = 0; i < g.nx; ++i) surf += (G.value(pb[i]) + G.value(pt[i])) * g.dx;
  r.e_surf = surf;
  r.e_total = r.e_bulk + r.e_surf;

  r.m_bulk = bulk_mean(phi, g);
  r.m_bot = surface_mean(pb, g);
  r.m_top = surface_mean(pt, g);
  return r;
}

ChemPotentials chemical_potentials(const State& s_new, const State& s_old,
                                   const Potential& F, const Potential& G,
                                   double kappa, double alpha, double dt,
                                   const Grid& g) {
  if (alpha > 0.0 && !(dt > 0.0))
    throw std::invalid_argument("chemical_potentials: alpha > 0 requires dt > 0");
  if (!s_new.phi.same_shape(s_old.phi))
    throw std::invalid_argument("chemical_potentials: state shapes differ");
  const BulkField& p = s_new.phi;
  const BulkField& q = s_old.phi;
  const double visc = (alpha > 0.0) ? alpha / dt : 0.0;

  ChemPotentials c{BulkField(g), TraceField(g, Circle::bottom), TraceField(g, Circle::top)};
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int ip = (i + 1 == g.nx) ? 0 : i + 1;
      const int im = (i == 0) ? g.nx - 1 : i - 1;
      const double lxx = (p(ip, j) - 2.0 * p(i, j) + p(im, j)) * ix2;
      double lyy;
      if (j == 0)
        lyy = (2.0 * p(i, 0) - 5.0 * p(i, 1) + 4.0 * p(i, 2) - p(i, 3)) * iy2;
      else if (j == g.ny)
        lyy = (2.0 * p(i, j) - 5.0 * p(i, j - 1) + 4.0 * p(i, j - 2) - p(i, j - 3)) * iy2;
      else
        lyy = (p(i, j + 1) - 2.0 * p(i, j) + p(i, j - 1)) * iy2;
      c.mu(i, j) = -(lxx + lyy) + visc * (p(i, j) - q(i, j)) + F.d1(p(i, j));
    }

  for (Circle side : {Circle::bottom, Circle::top}) {
    const TraceField ps = trace(p, g, side);
    const TraceField qs = trace(q, g, side);
    const TraceField lap = surface_laplacian(ps, g);
    const TraceField dn = normal_derivative(p, g, side);
    TraceField& out = (side == Circle::bottom) ? c.mu_bot : c.mu_top;
    for (int i = 0; i < g.nx; ++i)
      out[i] = -kappa * lap[i] + ps[i] + dn[i] + visc * (ps[i] - qs[i]) + G.d1(ps[i]);
  }
  return c;
}

Dissipation dissipation(const ChemPotentials& c, const Grid& g) {
  Dissipation d;
  d.d_bulk = bulk_grad_norm_sq(c.mu, g);
  d.d_surf = surface_grad_norm_sq(c.mu_bot, g) + surface_grad_norm_sq(c.mu_top, g);
  return d;
}

double state_distance(const State& a, const State& b, const Grid& g) {
  double bulk = 0.0;
  for (int j = 0; j <= g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double d = a.phi(i, j) - b.phi(i, j);
      row += d * d;
    }
    bulk += g.wy(j) * row;
  }
  bulk *= g.dx * g.dy;
  double surf = 0.0;
  for (int j : {0, g.ny})
    for (int i = 0; i < g.nx; ++i) {
      const double d = a.phi(i, j) - b.phi(i, j);
      surf += d * d;
    }
  surf *= g.dx;
  return std::sqrt(bulk + surf);
}

double bulk_l2_distance(const State& a, const State& b, const Grid& g) {
  double bulk = 0.0;
  for (int j = 0; j <= g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double d = a.phi(i, j) - b.phi(i, j);
      row += d * d;
    }
    bulk += g.wy(j) * row;
  }
  return std::sqrt(bulk * g.dx * g.dy);
}

}  // namespace chdbc
