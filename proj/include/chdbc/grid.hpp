// Periodic-strip grid and the discrete operators everything else is built on.
//
// Domain: [0,Lx) x [0,Ly], periodic in x. Nodes (x_i, y_j) with i = 0..Nx-1,
// j = 0..Ny. Rows j = 0 and j = Ny are the two boundary circles. All integrals
// use one shared quadrature: uniform rectangle rule in x, trapezoid in y
// (weights 1/2 on the boundary rows), and plain rectangle rule on each circle.

#pragma once

#include <cstddef>
#include <vector>

namespace chdbc {

enum class Circle { bottom, top };

struct Grid {
  int nx = 0;  // periodic columns
  int ny = 0;  // y cells; ny+1 node rows
  double lx = 0.0, ly = 0.0;
  double dx = 0.0, dy = 0.0;

  int n_rows() const { return ny + 1; }
  std::size_t n_nodes() const { return static_cast<std::size_t>(nx) * (ny + 1); }
  double area() const { return lx * ly; }           // |Omega|
  double surface_len() const { return 2.0 * lx; }   // |Gamma| (both circles)
  double circle_len() const { return lx; }
  double x(int i) const { return i * dx; }
  double y(int j) const { return j * dy; }
  // trapezoid weight of node row j
  double wy(int j) const { return (j == 0 || j == ny) ? 0.5 : 1.0; }
};

// Fails on nx not a power of two (>= 8), ny < 8, or non-positive extents.
Grid build_grid(int nx, int ny, double lx, double ly);

// Nodal field on the closed strip, row-major: v[j*nx + i].
struct BulkField {
  int nx = 0, ny = 0;
  std::vector<double> v;

  BulkField() = default;
  BulkField(const Grid& g, double fill = 0.0)
      : nx(g.nx), ny(g.ny), v(g.n_nodes(), fill) {}

  double& operator()(int i, int j) { return v[static_cast<std::size_t>(j) * nx + i]; }
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(j) * nx + i]; }
  bool same_shape(const BulkField& o) const { return nx == o.nx && ny == o.ny; }
};

// Nodal field on one boundary circle.
struct TraceField {
  int nx = 0;
  Circle circle = Circle::bottom;
  std::vector<double> v;

  TraceField() = default;
  TraceField(const Grid& g, Circle c, double fill = 0.0)
      : nx(g.nx), circle(c), v(static_cast<std::size_t>(g.nx), fill) {}

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

TraceField trace(const BulkField& f, const Grid& g, Circle c);
void set_trace(BulkField& f, const Grid& g, const TraceField& t);

// Quadrature functionals.
double bulk_inner(const BulkField& a, const BulkField& b, const Grid& g);
double surface_inner(const TraceField& a, const TraceField& b, const Grid& g);
double bulk_mean(const BulkField& f, const Grid& g);
double surface_mean(const TraceField& t, const Grid& g);  // one circle
// length-weighted mean over both circles
double surface_mean_total(const TraceField& bot, const TraceField& top, const Grid& g);

// Edge-based (mimetic) squared gradient norms; these are the forms the energy
// and the dissipation use, so summation by parts is exact.
double bulk_grad_norm_sq(const BulkField& f, const Grid& g);
double surface_grad_norm_sq(const TraceField& t, const Grid& g);

// Five-point Laplacian on interior rows. Boundary rows of the result are
// flagged NaN: the strip has no one-sided closure here by design, callers
// that need one (chemical potentials) apply their own.
BulkField bulk_laplacian(const BulkField& f, const Grid& g);

// Periodic three-point Laplacian along one circle.
TraceField surface_laplacian(const TraceField& t, const Grid& g);

// Outward normal derivative on a circle, second-order one-sided stencil:
// bottom (n = -e_y): (3 f_0 - 4 f_1 + f_2) / (2 dy), top mirrored.
TraceField normal_derivative(const BulkField& f, const Grid& g, Circle c);

}  // namespace chdbc
