// Bulk and surface potentials, their convex/concave splitting, and the
// empirical validation of the structural assumptions the theory needs.

#pragma once

#include <functional>
#include <string>

namespace chdbc {

// Smooth scalar potential with its carried structural constants:
//   value(y) >= -lower_bound            (A2, value part)
//   d2(y)    >= -curvature_bound        (A2, curvature part)
//   |d2(y)|  <= growth_coeff * (1 + |y|^growth_exp)   (A3)
struct Potential {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  double lower_bound = 0.0;      // C
  double curvature_bound = 0.0;  // C-tilde
  double growth_coeff = 0.0;     // C-hat
  double growth_exp = 0.0;       // p (bulk) or q (surface)
  std::string label;
};

// F(y) = (y^2 - 1)^2 / 4; constants C = 0, C~ = 1, C^ = 3, exponent 2.
Potential quartic_double_well();

// G(y) = (gamma/2) cos(theta_s) sin(pi y / 2) - y^2 / 2, the contact-line
// surface potential (the full surface density is psi^2/2 + G). G itself is
// quadratically unbounded below, so the carried A2 constant only covers the
// default validation window |y| <= 5.
Potential contact_line_surface(double gamma, double theta_s);

// value = d1 = d2 = 0; handy for isolating terms in tests.
Potential zero_potential();

// Lookup by config name: "quartic" | "contact_line" | "zero".
Potential potential_by_name(const std::string& name, double gamma = 1.0,
                            double theta_s = 1.0471975511965976);

// F~(y) = F(y) + (C~ + 1)/2 y^2 - F'(0) y - F(0):
// F~(0) = F~'(0) = 0 and F~'' >= 1 on the sampled range.
struct ConvexSplit {
  Potential base;
  std::function<double(double)> tilde_value;
  std::function<double(double)> tilde_d1;
  std::function<double(double)> tilde_d2;
};

ConvexSplit convex_split(const Potential& p);

struct AssumptionCheck {
  bool pass = false;
  std::string detail;
};

struct AssumptionReport {
  AssumptionCheck a2_bulk, a2_surf;    // lower bounds (value and curvature)
  AssumptionCheck a3_bulk, a3_surf;    // growth of second derivatives
  AssumptionCheck a4;                  // |F~'| <= rho1 |G~'| + rho2 (heuristic fit)
  double c_bulk_emp = 0.0, c_surf_emp = 0.0;          // tight -min value
  double ctilde_bulk_emp = 0.0, ctilde_surf_emp = 0.0;  // tight -min d2
  double chat_bulk_emp = 0.0, chat_surf_emp = 0.0;      // tight growth coeff
  double rho1 = 0.0, rho2 = 0.0;
  bool all_pass() const {
    return a2_bulk.pass && a2_surf.pass && a3_bulk.pass && a3_surf.pass && a4.pass;
  }
};

// Samples both potentials on [-range, range] (default 5) and reports which
// assumptions hold there with tight empirical constants. kappa enters only
// through the surface growth restriction: kappa == 0 requires growth_exp == 0.
AssumptionReport validate_assumptions(const Potential& F, const Potential& G,
                                      double kappa, double range = 5.0,
                                      int samples = 4001);

}  // namespace chdbc
