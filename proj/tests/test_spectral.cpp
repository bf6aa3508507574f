#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chdbc/grid.hpp"
#include "chdbc/init.hpp"
#include "chdbc/spectral.hpp"

using namespace chdbc;

TEST_CASE("fft round trip") {
  Grid g = build_grid(32, 12, 2.0, 1.0);
  SpectralWorkspace ws(g);

  BulkField f(g, 0.0);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = uniform_pm1(7, j * g.nx + i);

  std::vector<cplx> spec;
  ws.forward(f, spec);
  BulkField back(g, 0.0);
  ws.inverse(spec, back);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      CHECK(back(i, j) == doctest::Approx(f(i, j)).epsilon(1e-13));

  TraceField tb(g, Circle::bottom), tt(g, Circle::top);
  for (int i = 0; i < g.nx; ++i) {
    tb[i] = uniform_pm1(8, i);
    tt[i] = uniform_pm1(9, i);
  }
  std::vector<cplx> tspec;
  ws.forward_trace(tb, tt, tspec);
  TraceField rb(g, Circle::bottom), rt(g, Circle::top);
  ws.inverse_trace(tspec, rb, rt);
  for (int i = 0; i < g.nx; ++i) {
    CHECK(rb[i] == doctest::Approx(tb[i]).epsilon(1e-13));
    CHECK(rt[i] == doctest::Approx(tt[i]).epsilon(1e-13));
  }
}

TEST_CASE("mode symbol matches the circle laplacian") {
  Grid g = build_grid(32, 8, 2.0, 1.0);
  CHECK(mode_lambda(0, g) == 0.0);
  for (int k : {1, 3, g.nx / 2}) {
    TraceField t(g, Circle::bottom);
    for (int i = 0; i < g.nx; ++i) t[i] = std::cos(2.0 * M_PI * k * g.x(i) / g.lx);
    TraceField lap = surface_laplacian(t, g);
    double lam = mode_lambda(k, g);
    for (int i = 0; i < g.nx; ++i)
      CHECK(-lap[i] == doctest::Approx(lam * t[i]).epsilon(1e-10));
  }
}

TEST_CASE("banded LU solves what apply builds") {
  const int n = 14;
  BandedMatrix a(n, 3, 3);
  for (int r = 0; r < n; ++r)
    for (int c = std::max(0, r - 3); c <= std::min(n - 1, r + 3); ++c)
      a.at(r, c) = (r == c) ? 5.0 + 0.1 * r : uniform_pm1(42, 100 * r + c);

  std::vector<double> x(n), b(n);
  for (int i = 0; i < n; ++i) x[i] = uniform_pm1(5, i);
  a.apply(x.data(), b.data());

  BandedMatrix lu = a;
  lu.factor();
  std::vector<double> sol = b;
  lu.solve(sol.data(), 1);
  for (int i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-11));

  std::vector<double> y(n);
  CHECK_THROWS_AS(lu.apply(sol.data(), y.data()), std::logic_error);
  CHECK_THROWS_AS(a.solve(sol.data(), 1), std::logic_error);
}

TEST_CASE("zero-mode system carries exact conservation structure") {
  Grid g = build_grid(16, 10, 1.0, 1.0);
  const double dt = 1e-3;
  BandedMatrix a = assemble_mode_system(0, g, dt, 0.1, 0.0, 2.0, 2.0, false);
  const int n = a.n;
  REQUIRE(n == 2 * (g.ny + 1) + 2);

  auto cphi = [&](int j) { return 1 + 2 * j; };
  auto cmu = [&](int j) { return 2 + 2 * j; };

  // Column sums over the flux rows: w_j dy on the dphi columns, zero on the
  // mu and muGamma columns. This is what makes bulk mass exact.
  for (int c = 0; c < n; ++c) {
    double sum = 0.0;
    for (int j = 0; j <= g.ny; ++j) sum += a.get(cphi(j), c);  // flux row index
    double expect = 0.0;
    for (int j = 0; j <= g.ny; ++j)
      if (c == cphi(j)) expect = g.wy(j) * g.dy;
    CHECK(sum == doctest::Approx(expect).epsilon(1e-14));
  }

  // Trace rows at k = 0 pin the circle means: dphi_bd = 0 with no coupling.
  for (int c = 0; c < n; ++c) {
    double expect_bot = (c == cphi(0)) ? 1.0 : 0.0;
    double expect_top = (c == cphi(g.ny)) ? 1.0 : 0.0;
    CHECK(a.get(0, c) == doctest::Approx(expect_bot));
    CHECK(a.get(n - 1, c) == doctest::Approx(expect_top));
  }

  // mu-column coupling in the mu rows is symmetric-signed: weak rows subtract
  // the quadrature weight.
  CHECK(a.get(cmu(3), cmu(3)) == doctest::Approx(-g.dy));
  CHECK(a.get(cmu(0), cmu(0)) == doctest::Approx(-0.5 * g.dy));
}

TEST_CASE("assembly and transforms are deterministic") {
  Grid g = build_grid(16, 8, 1.0, 1.0);
  BandedMatrix a = assemble_mode_system(3, g, 1e-4, 0.1, 0.05, 2.0, 2.0, false);
  BandedMatrix b = assemble_mode_system(3, g, 1e-4, 0.1, 0.05, 2.0, 2.0, false);
  REQUIRE(a.ab.size() == b.ab.size());
  for (std::size_t i = 0; i < a.ab.size(); ++i) CHECK(a.ab[i] == b.ab[i]);

  SpectralWorkspace ws(g);
  BulkField f(g, 0.0);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = uniform_pm1(3, j * g.nx + i);
  std::vector<cplx> s1, s2;
  ws.forward(f, s1);
  ws.forward(f, s2);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].real() == s2[i].real());
    CHECK(s1[i].imag() == s2[i].imag());
  }
}

TEST_CASE("elliptic solve reproduces constants exactly") {
  Grid g = build_grid(16, 12, 1.0, 1.0);
  BulkField h1(g, 0.0);
  TraceField h2b(g, Circle::bottom, 3.5), h2t(g, Circle::top, 3.5);
  BulkField phi = solve_elliptic(h1, h2b, h2t, 0.1, g);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      CHECK(phi(i, j) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("H^-1 seminorm oracle on a single mode") {
  Grid g = build_grid(32, 16, 1.0, 1.0);
  BulkField f(g, 0.0);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f(i, j) = std::cos(2.0 * M_PI * g.x(i));

  double lam = mode_lambda(1, g);
  double expect = std::sqrt(0.5 * g.area() / lam);
  CHECK(hminus1_seminorm(f, g) == doctest::Approx(expect).epsilon(1e-11));

  // scaling and mean invariance
  BulkField f2 = f;
  for (auto& v : f2.v) v = 2.0 * v + 7.0;
  CHECK(hminus1_seminorm(f2, g) == doctest::Approx(2.0 * expect).epsilon(1e-11));

  BulkField c(g, 4.0);
  CHECK(hminus1_seminorm(c, g) == doctest::Approx(0.0));
}
