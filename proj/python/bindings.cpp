// pybind11 surface: grids, states, the stepper/run loop, energies, stationary
// solves and snapshot I/O. Heavy lifting stays in the C++ core; everything
// crossing the boundary is copied into plain numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "chdbc/energy.hpp"
#include "chdbc/grid.hpp"
#include "chdbc/init.hpp"
#include "chdbc/io.hpp"
#include "chdbc/potential.hpp"
#include "chdbc/solver.hpp"
#include "chdbc/stationary.hpp"

namespace py = pybind11;
using namespace chdbc;

namespace {

py::array_t<double> field_array(const State& s) {
  py::array_t<double> a({s.phi.ny + 1, s.phi.nx});
  std::copy(s.phi.v.begin(), s.phi.v.end(), a.mutable_data());
  return a;
}

State state_from_array(const Grid& g, py::array_t<double, py::array::c_style> arr) {
  if (arr.ndim() != 2 || arr.shape(0) != g.ny + 1 || arr.shape(1) != g.nx)
    throw std::invalid_argument("array shape must be (ny+1, nx)");
  State s(g);
  std::copy(arr.data(), arr.data() + s.phi.v.size(), s.phi.v.begin());
  return s;
}

SolverParams make_params(double dt, double kappa, double alpha, double s_bulk,
                         double s_surf) {
  SolverParams p;
  p.dt = dt;
  p.kappa = kappa;
  p.alpha = alpha;
  p.s_bulk = s_bulk;
  p.s_surf = s_surf;
  return p;
}

py::array_t<double> column(const Trajectory& tr, double EnergyReport::* f) {
  // explicit shape container: a bare count would pick the scalar array_t ctor,
  // which mis-strides 1-d arrays on older pybind11s
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(tr.reports.size())};
  py::array_t<double> a(shape);
  double* out = a.mutable_data();
  for (std::size_t i = 0; i < tr.reports.size(); ++i) out[i] = tr.reports[i].*f;
  return a;
}

py::dict report_dict(const EnergyReport& r) {
  py::dict d;
  d["time"] = r.time;
  d["e_bulk"] = r.e_bulk;
  d["e_surf"] = r.e_surf;
  d["e_total"] = r.e_total;
  d["m_bulk"] = r.m_bulk;
  d["m_bot"] = r.m_bot;
  d["m_top"] = r.m_top;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cahn-Hilliard flow with dynamic boundary conditions on a periodic strip";

  py::class_<Grid>(m, "Grid")
      .def(py::init(&build_grid), py::arg("nx"), py::arg("ny"), py::arg("lx") = 1.0,
           py::arg("ly") = 1.0)
      .def_readonly("nx", &Grid::nx)
      .def_readonly("ny", &Grid::ny)
      .def_readonly("lx", &Grid::lx)
      .def_readonly("ly", &Grid::ly)
      .def_readonly("dx", &Grid::dx)
      .def_readonly("dy", &Grid::dy)
      .def_property_readonly("area", &Grid::area)
      .def_property_readonly("surface_len", &Grid::surface_len)
      .def("__repr__", [](const Grid& g) {
        return "Grid(nx=" + std::to_string(g.nx) + ", ny=" + std::to_string(g.ny) +
               ", lx=" + std::to_string(g.lx) + ", ly=" + std::to_string(g.ly) + ")";
      });

  py::class_<Potential>(m, "Potential")
      .def_readonly("label", &Potential::label)
      .def("value", [](const Potential& p, double y) { return p.value(y); })
      .def("d1", [](const Potential& p, double y) { return p.d1(y); })
      .def("d2", [](const Potential& p, double y) { return p.d2(y); });

  m.def("potential", &potential_by_name, py::arg("name"), py::arg("gamma") = 1.0,
        py::arg("theta_s") = 1.0471975511965976,
        "Potential by name: quartic | contact_line | zero");

  py::class_<State>(m, "State")
      .def_readwrite("time", &State::time)
      .def_property_readonly("field", &field_array,
                             "nodal values as an (ny+1, nx) array copy")
      .def_static("constant", &constant_state, py::arg("grid"), py::arg("value"))
      .def_static("random", &random_state, py::arg("grid"), py::arg("mean"),
                  py::arg("amplitude"), py::arg("seed"))
      .def_static("from_array", &state_from_array, py::arg("grid"), py::arg("array"));

  m.def(
      "total_energy",
      [](const State& s, const Grid& g, double kappa, const Potential& F,
         const Potential& G) { return report_dict(total_energy(s, F, G, kappa, g)); },
      py::arg("state"), py::arg("grid"), py::arg("kappa") = 0.1,
      py::arg("F") = quartic_double_well(), py::arg("G") = quartic_double_well());

  m.def(
      "step",
      [](State& s, const Grid& g, double dt, double kappa, double alpha,
         double s_bulk, double s_surf, const Potential& F, const Potential& G) {
        StepReport rep =
            chdbc::step(s, make_params(dt, kappa, alpha, s_bulk, s_surf), F, G, g);
        py::dict d;
        d["dt_accepted"] = rep.dt_accepted;
        d["halvings"] = rep.halvings;
        d["energy_before"] = rep.energy_before;
        d["energy_after"] = rep.energy_after;
        d["d_bulk"] = rep.d_bulk;
        d["d_surf"] = rep.d_surf;
        d["d_visc"] = rep.d_visc;
        d["solve_residual"] = rep.solve_residual;
        return d;
      },
      py::arg("state"), py::arg("grid"), py::arg("dt") = 1e-4,
      py::arg("kappa") = 0.1, py::arg("alpha") = 0.0, py::arg("s_bulk") = 2.0,
      py::arg("s_surf") = 2.0, py::arg("F") = quartic_double_well(),
      py::arg("G") = quartic_double_well(),
      "Advance the state by one accepted step (in place); returns the step report");

  m.def(
      "run",
      [](const State& s0, const Grid& g, double t_end, double dt, double kappa,
         double alpha, double s_bulk, double s_surf, int report_every,
         int snapshot_every, double equilibrium_tol, long max_steps,
         const Potential& F, const Potential& G) {
        RunOptions o;
        o.t_end = t_end;
        o.report_every = report_every;
        o.snapshot_every = snapshot_every;
        o.equilibrium_tol = equilibrium_tol;
        o.max_steps = max_steps;
        Trajectory tr =
            run(s0, make_params(dt, kappa, alpha, s_bulk, s_surf), F, G, g, o);
        py::dict d;
        d["t"] = column(tr, &EnergyReport::time);
        d["e_bulk"] = column(tr, &EnergyReport::e_bulk);
        d["e_surf"] = column(tr, &EnergyReport::e_surf);
        d["e_total"] = column(tr, &EnergyReport::e_total);
        d["d_bulk"] = column(tr, &EnergyReport::d_bulk);
        d["d_surf"] = column(tr, &EnergyReport::d_surf);
        d["d_visc"] = column(tr, &EnergyReport::d_visc);
        d["m_bulk"] = column(tr, &EnergyReport::m_bulk);
        d["m_bot"] = column(tr, &EnergyReport::m_bot);
        d["m_top"] = column(tr, &EnergyReport::m_top);
        d["final"] = tr.final_state;
        d["steps"] = tr.steps_taken;
        d["reached_equilibrium"] = tr.reached_equilibrium;
        py::list snaps;
        for (const State& s : tr.snapshots) snaps.append(s);
        d["snapshots"] = snaps;
        return d;
      },
      py::arg("state"), py::arg("grid"), py::arg("t_end"), py::arg("dt") = 1e-4,
      py::arg("kappa") = 0.1, py::arg("alpha") = 0.0, py::arg("s_bulk") = 2.0,
      py::arg("s_surf") = 2.0, py::arg("report_every") = 1,
      py::arg("snapshot_every") = 0, py::arg("equilibrium_tol") = 0.0,
      py::arg("max_steps") = 1000000000L, py::arg("F") = quartic_double_well(),
      py::arg("G") = quartic_double_well(),
      "Integrate to t_end; returns report columns, snapshots and the final state");

  m.def(
      "solve_stationary",
      [](const State& init, const Grid& g, double m_bulk, double m_surf, double kappa,
         double tol, const Potential& F, const Potential& G) {
        StationaryParams sp;
        sp.kappa = kappa;
        sp.tol = tol;
        StationaryResult r = solve_stationary(init, m_bulk, m_surf, F, G, sp, g);
        py::dict d;
        d["state"] = r.state;
        d["lambda1"] = r.lambda1;
        d["lambda2"] = r.lambda2;
        d["residual_bulk"] = r.residual_bulk;
        d["residual_surf"] = r.residual_surf;
        d["iterations"] = r.iterations;
        d["pseudo_steps"] = r.pseudo_steps;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("init"), py::arg("grid"), py::arg("m_bulk"), py::arg("m_surf"),
      py::arg("kappa") = 0.1, py::arg("tol") = 1e-9,
      py::arg("F") = quartic_double_well(), py::arg("G") = quartic_double_well(),
      "Mass-constrained stationary solve; returns state, multipliers, residuals");

  m.def(
      "multipliers",
      [](const State& s, const Grid& g, double kappa, const Potential& F,
         const Potential& G) { return multipliers(s, F, G, kappa, g); },
      py::arg("state"), py::arg("grid"), py::arg("kappa") = 0.1,
      py::arg("F") = quartic_double_well(), py::arg("G") = quartic_double_well(),
      "Mean-value multiplier identities evaluated on the given state");

  m.def(
      "write_snapshot",
      [](const State& s, const Grid& g, const std::string& path) {
        write_snapshot(s, g, path);
      },
      py::arg("state"), py::arg("grid"), py::arg("path"));

  m.def(
      "read_snapshot",
      [](const std::string& path) {
        Snapshot sn = read_snapshot(path);
        return py::make_tuple(sn.state, sn.grid);
      },
      py::arg("path"), "Returns (state, grid) parsed from a snapshot file");
}
