#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "chdbc/potential.hpp"

using namespace chdbc;

TEST_CASE("quartic double well values") {
  Potential F = quartic_double_well();
  CHECK(F.value(1.0) == doctest::Approx(0.0));
  CHECK(F.value(-1.0) == doctest::Approx(0.0));
  CHECK(F.value(0.0) == doctest::Approx(0.25));
  CHECK(F.d1(0.5) == doctest::Approx(-0.375));
  CHECK(F.d1(1.0) == doctest::Approx(0.0));
  CHECK(F.d2(0.0) == doctest::Approx(-1.0));
  CHECK(F.d2(1.0) == doctest::Approx(2.0));
  CHECK(F.lower_bound == 0.0);
  CHECK(F.curvature_bound == 1.0);
}

TEST_CASE("quartic derivatives are consistent (finite differences)") {
  Potential F = quartic_double_well();
  const double h = 1e-6;
  for (double y : {-1.7, -0.3, 0.0, 0.6, 2.2}) {
    double fd1 = (F.value(y + h) - F.value(y - h)) / (2 * h);
    double fd2 = (F.d1(y + h) - F.d1(y - h)) / (2 * h);
    CHECK(F.d1(y) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(F.d2(y) == doctest::Approx(fd2).epsilon(1e-8));
  }
}

TEST_CASE("contact line surface potential") {
  const double gamma = 1.0, theta = std::acos(0.5);  // cos theta_s = 1/2
  Potential G = contact_line_surface(gamma, theta);
  // a = gamma cos(theta)/2 = 1/4; G(1) = a - 1/2
  CHECK(G.value(1.0) == doctest::Approx(0.25 - 0.5).epsilon(1e-12));
  CHECK(G.d2(0.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(G.growth_exp == 0.0);
  const double h = 1e-6;
  for (double y : {-0.9, 0.2, 1.4}) {
    double fd1 = (G.value(y + h) - G.value(y - h)) / (2 * h);
    CHECK(G.d1(y) == doctest::Approx(fd1).epsilon(1e-7));
  }
  // carried A2 constants actually cover the default window
  for (double y = -5.0; y <= 5.0; y += 0.01) {
    CHECK(G.value(y) >= -G.lower_bound - 1e-12);
    CHECK(G.d2(y) >= -G.curvature_bound - 1e-12);
  }
}

TEST_CASE("potential lookup") {
  CHECK(potential_by_name("quartic").label == "quartic");
  CHECK(potential_by_name("zero").label == "zero");
  CHECK(potential_by_name("contact_line", 2.0, 0.5).label == "contact_line");
  CHECK_THROWS_AS(potential_by_name("cubic"), std::invalid_argument);
}

TEST_CASE("convex split is strongly convex and reconstructs the base") {
  ConvexSplit s = convex_split(quartic_double_well());
  CHECK(s.tilde_value(0.0) == doctest::Approx(0.0));
  CHECK(s.tilde_d1(0.0) == doctest::Approx(0.0));
  const double c = 0.5 * (1.0 + 1.0);  // (Ctilde + 1)/2 for the quartic
  const double f0 = s.base.value(0.0);  // F'(0) = 0, F(0) = 1/4
  for (double y = -3.0; y <= 3.0; y += 0.05) {
    CHECK(s.tilde_d2(y) >= 1.0 - 1e-12);
    double rebuilt = s.tilde_value(y) - c * y * y + f0;
    CHECK(rebuilt == doctest::Approx(s.base.value(y)).epsilon(1e-12));
  }
}

TEST_CASE("assumption validation") {
  Potential F = quartic_double_well(), G = quartic_double_well();

  AssumptionReport ok = validate_assumptions(F, G, 0.1);
  CHECK(ok.all_pass());
  CHECK(ok.ctilde_bulk_emp == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ok.c_bulk_emp == doctest::Approx(0.0));

  // kappa = 0 restricts the surface growth exponent to q = 0
  AssumptionReport deg = validate_assumptions(F, G, 0.0);
  CHECK_FALSE(deg.a3_surf.pass);
  CHECK(deg.a3_bulk.pass);

  AssumptionReport degzero = validate_assumptions(F, zero_potential(), 0.0);
  CHECK(degzero.a3_surf.pass);

  CHECK_THROWS_AS(validate_assumptions(F, G, 0.1, -1.0), std::invalid_argument);
}
