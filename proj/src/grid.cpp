#include "chdbc/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chdbc {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid build_grid(int nx, int ny, double lx, double ly) {
  if (!power_of_two(nx) || nx < 8)
    throw std::invalid_argument("build_grid: nx must be a power of two >= 8, got " +
                                std::to_string(nx));
  if (ny < 8)
    throw std::invalid_argument("build_grid: ny must be >= 8, got " + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("build_grid: domain extents must be positive");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  g.dx = lx / nx;
  g.dy = ly / ny;
  return g;
}

TraceField trace(const BulkField& f, const Grid& g, Circle c) {
  TraceField t(g, c);
  const int j = (c == Circle::bottom) ? 0 : g.ny;
  for (int i = 0; i < g.nx; ++i) t[i] = f(i, j);
  return t;
}

void set_trace(BulkField& f, const Grid& g, const TraceField& t) {
  const int j = (t.circle == Circle::bottom) ? 0 : g.ny;
  for (int i = 0; i < g.nx; ++i) f(i, j) = t[i];
}

double bulk_inner(const BulkField& a, const BulkField& b, const Grid& g) {
  double s = 0.0;
  for (int j = 0; j <= g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += a(i, j) * b(i, j);
    s += g.wy(j) * row;
  }
  return s * g.dx * g.dy;
}

double surface_inner(const TraceField& a, const TraceField& b, const Grid& g) {
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i) s += a[i] * b[i];
  return s * g.dx;
}

double bulk_mean(const BulkField& f, const Grid& g) {
  double s = 0.0;
  for (int j = 0; j <= g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += f(i, j);
    s += g.wy(j) * row;
  }
  return s * g.dx * g.dy / g.area();
}

double surface_mean(const TraceField& t, const Grid& g) {
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i) s += t[i];
  return s / g.nx;
}

double surface_mean_total(const TraceField& bot, const TraceField& top, const Grid& g) {
  return 0.5 * (surface_mean(bot, g) + surface_mean(top, g));
}

double bulk_grad_norm_sq(const BulkField& f, const Grid& g) {
  double sx = 0.0;
  for (int j = 0; j <= g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const int ip = (i + 1 == g.nx) ? 0 : i + 1;
      const double d = (f(ip, j) - f(i, j)) / g.dx;
      row += d * d;
    }
    sx += g.wy(j) * row;
  }
  double sy = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (f(i, j + 1) - f(i, j)) / g.dy;
      sy += d * d;
    }
  return (sx + sy) * g.dx * g.dy;
}

double surface_grad_norm_sq(const TraceField& t, const Grid& g) {
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const int ip = (i + 1 == g.nx) ? 0 : i + 1;
    const double d = (t[ip] - t[i]) / g.dx;
    s += d * d;
  }
  return s * g.dx;
}

BulkField bulk_laplacian(const BulkField& f, const Grid& g) {
  BulkField out(g);
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int ip = (i + 1 == g.nx) ? 0 : i + 1;
      const int im = (i == 0) ? g.nx - 1 : i - 1;
      out(i, j) = (f(ip, j) - 2.0 * f(i, j) + f(im, j)) * ix2 +
                  (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * iy2;
    }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < g.nx; ++i) {
    out(i, 0) = nan;
    out(i, g.ny) = nan;
  }
  return out;
}

TraceField surface_laplacian(const TraceField& t, const Grid& g) {
  TraceField out(g, t.circle);
  const double ix2 = 1.0 / (g.dx * g.dx);
  for (int i = 0; i < g.nx; ++i) {
    const int ip = (i + 1 == g.nx) ? 0 : i + 1;
    const int im = (i == 0) ? g.nx - 1 : i - 1;
    out[i] = (t[ip] - 2.0 * t[i] + t[im]) * ix2;
  }
  return out;
}

TraceField normal_derivative(const BulkField& f, const Grid& g, Circle c) {
  TraceField out(g, c);
  const double h = 2.0 * g.dy;
  if (c == Circle::bottom) {
    for (int i = 0; i < g.nx; ++i)
      out[i] = (3.0 * f(i, 0) - 4.0 * f(i, 1) + f(i, 2)) / h;
  } else {
    const int n = g.ny;
    for (int i = 0; i < g.nx; ++i)
      out[i] = (3.0 * f(i, n) - 4.0 * f(i, n - 1) + f(i, n - 2)) / h;
  }
  return out;
}

}  // namespace chdbc
