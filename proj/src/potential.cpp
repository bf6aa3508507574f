#include "chdbc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chdbc {

Potential quartic_double_well() {
  Potential p;
  p.value = [](double y) { double s = y * y - 1.0; return 0.25 * s * s; };
  p.d1 = [](double y) { return y * (y * y - 1.0); };
  p.d2 = [](double y) { return 3.0 * y * y - 1.0; };
  p.lower_bound = 0.0;
  p.curvature_bound = 1.0;
  p.growth_coeff = 3.0;
  p.growth_exp = 2.0;
  p.label = "quartic";
  return p;
}

Potential contact_line_surface(double gamma, double theta_s) {
  const double pi = std::numbers::pi;
  const double a = 0.5 * gamma * std::cos(theta_s);
  Potential p;
  p.value = [a, pi](double y) { return a * std::sin(0.5 * pi * y) - 0.5 * y * y; };
  p.d1 = [a, pi](double y) { return 0.5 * pi * a * std::cos(0.5 * pi * y) - y; };
  p.d2 = [a, pi](double y) { return -0.25 * pi * pi * a * std::sin(0.5 * pi * y) - 1.0; };
  // A2 window |y| <= 5: trig part bounded by |a|, quadratic contributes 25/2.
  p.lower_bound = std::abs(a) + 12.5;
  p.curvature_bound = 1.0 + 0.25 * pi * pi * std::abs(a);
  p.growth_coeff = 1.0 + 0.25 * pi * pi * std::abs(a);
  p.growth_exp = 0.0;
  p.label = "contact_line";
  return p;
}

Potential zero_potential() {
  Potential p;
  p.value = [](double) { return 0.0; };
  p.d1 = [](double) { return 0.0; };
  p.d2 = [](double) { return 0.0; };
  p.label = "zero";
  return p;
}

Potential potential_by_name(const std::string& name, double gamma, double theta_s) {
  if (name == "quartic") return quartic_double_well();
  if (name == "contact_line") return contact_line_surface(gamma, theta_s);
  if (name == "zero") return zero_potential();
  throw std::invalid_argument("unknown potential '" + name +
                              "' (expected quartic | contact_line | zero)");
}

ConvexSplit convex_split(const Potential& p) {
  ConvexSplit s;
  s.base = p;
  const double c = 0.5 * (p.curvature_bound + 1.0);
  const double v0 = p.value(0.0), d10 = p.d1(0.0);
  s.tilde_value = [p, c, v0, d10](double y) {
    return p.value(y) + c * y * y - d10 * y - v0;
  };
  s.tilde_d1 = [p, c, d10](double y) { return p.d1(y) + 2.0 * c * y - d10; };
  s.tilde_d2 = [p, c](double y) { return p.d2(y) + 2.0 * c; };
  return s;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_a2_a3(const Potential& p, double range, int n, bool surface, double kappa,
                 AssumptionCheck& a2, AssumptionCheck& a3, double& c_emp,
                 double& ctilde_emp, double& chat_emp) {
  double min_val = 0.0, min_d2 = 0.0, max_ratio = 0.0;
  bool growth_ok = true;
  for (int k = 0; k < n; ++k) {
    const double y = -range + 2.0 * range * k / (n - 1);
    min_val = std::min(min_val, p.value(y));
    min_d2 = std::min(min_d2, p.d2(y));
    const double bound = p.growth_coeff * (1.0 + std::pow(std::abs(y), p.growth_exp));
    const double ratio = std::abs(p.d2(y)) / (1.0 + std::pow(std::abs(y), p.growth_exp));
    max_ratio = std::max(max_ratio, ratio);
    if (std::abs(p.d2(y)) > bound * (1.0 + 1e-12)) growth_ok = false;
  }
  c_emp = -min_val;
  ctilde_emp = -min_d2;
  chat_emp = max_ratio;
  a2.pass = (-min_val <= p.lower_bound * (1.0 + 1e-12) + 1e-12) &&
            (-min_d2 <= p.curvature_bound * (1.0 + 1e-12) + 1e-12);
  a2.detail = "min value " + num(min_val) + " vs -C=" + num(-p.lower_bound) +
              ", min d2 " + num(min_d2) + " vs -Ctilde=" + num(-p.curvature_bound);
  a3.pass = growth_ok;
  a3.detail = "|d2| <= Chat(1+|y|^" + num(p.growth_exp) + "), tight Chat=" + num(max_ratio);
  if (surface && kappa == 0.0 && p.growth_exp != 0.0) {
    a3.pass = false;
    a3.detail += "; kappa = 0 requires surface growth exponent q = 0, got q=" +
                 num(p.growth_exp);
  }
}

}  // namespace

AssumptionReport validate_assumptions(const Potential& F, const Potential& G,
                                      double kappa, double range, int samples) {
  if (samples < 16 || !(range > 0.0))
    throw std::invalid_argument("validate_assumptions: bad sampling window");
  AssumptionReport r;
  check_a2_a3(F, range, samples, false, kappa, r.a2_bulk, r.a3_bulk, r.c_bulk_emp,
              r.ctilde_bulk_emp, r.chat_bulk_emp);
  check_a2_a3(G, range, samples, true, kappa, r.a2_surf, r.a3_surf, r.c_surf_emp,
              r.ctilde_surf_emp, r.chat_surf_emp);

  // A4: fit rho1 on |y| <= range/2 by least squares, rho2 = max residual
  // there, then require the bound (10% slack) on the full window.
  const ConvexSplit f = convex_split(F), g = convex_split(G);
  double sgg = 0.0, sfg = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double y = -0.5 * range + range * k / (samples - 1);
    const double fa = std::abs(f.tilde_d1(y)), ga = std::abs(g.tilde_d1(y));
    sgg += ga * ga;
    sfg += fa * ga;
  }
  r.rho1 = (sgg > 0.0) ? sfg / sgg : 0.0;
  double rho2 = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double y = -0.5 * range + range * k / (samples - 1);
    rho2 = std::max(rho2, std::abs(f.tilde_d1(y)) - r.rho1 * std::abs(g.tilde_d1(y)));
  }
  r.rho2 = std::max(rho2, 0.0);
  bool ok = true;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double y = -range + 2.0 * range * k / (samples - 1);
    const double excess = std::abs(f.tilde_d1(y)) -
                          (r.rho1 * std::abs(g.tilde_d1(y)) + r.rho2);
    worst = std::max(worst, excess);
    if (excess > 0.1 * (r.rho2 + 1.0)) ok = false;
  }
  r.a4.pass = ok;
  r.a4.detail = "rho1=" + num(r.rho1) + " rho2=" + num(r.rho2) +
                " worst excess=" + num(worst) + " (heuristic fit)";
  return r;
}

}  // namespace chdbc
