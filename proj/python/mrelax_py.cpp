#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "mrelax/audit.hpp"
#include "mrelax/converge.hpp"
#include "mrelax/errors.hpp"
#include "mrelax/runner.hpp"

namespace py = pybind11;
using namespace mrelax;

namespace {

// pybind11 holders cannot be shared_ptr-to-const, so the grid handle is a
// thin wrapper around GridPtr.
struct PyGrid {
  GridPtr ptr;
};

Field field_from_array(const PyGrid& g, const py::array_t<double>& arr) {
  if (arr.ndim() != 1 || static_cast<std::size_t>(arr.shape(0)) != g.ptr->n)
    throw std::invalid_argument("array length must equal grid.n");
  std::vector<double> v(arr.data(), arr.data() + arr.shape(0));
  return Field(g.ptr, std::move(v));
}

py::array_t<double> array_from_field(const Field& f) {
  py::array_t<double> out(f.size());
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

double ext_value(const relaxvars::ExtReal& e) {
  return e.infinite ? std::numeric_limits<double>::infinity() : e.value;
}

py::dict record_to_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["time"] = r.time;
  d["mass"] = r.mass;
  d["flux_mean"] = r.flux_mean;
  d["energy"] = r.energy;
  d["dissipation"] = r.dissipation;
  d["min_rho"] = r.min_rho;
  d["max_rho"] = r.max_rho;
  d["max_abs_b"] = r.max_abs_b;
  d["min_w"] = r.min_w;
  d["min_z"] = r.min_z;
  d["l2_rho_dev"] = r.l2_rho_dev;
  d["l2_b_dev"] = r.l2_b_dev;
  d["hs_rho"] = r.hs_rho;
  d["hs_b"] = r.hs_b;
  d["coupled1"] = r.coupled1;
  d["coupled2"] = r.coupled2;
  d["dt"] = r.dt_used;
  return d;
}

}  // namespace

PYBIND11_MODULE(mrelax, m) {
  m.doc() = "1D compressible magnetic relaxation: pseudo-spectral solver and diagnostics";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<VacuumError>(m, "VacuumError", PyExc_RuntimeError);
  py::register_exception<StiffnessError>(m, "StiffnessError", PyExc_RuntimeError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);

  py::class_<PyGrid>(m, "Grid")
      .def_property_readonly("n", [](const PyGrid& g) { return g.ptr->n; })
      .def_property_readonly("length", [](const PyGrid& g) { return g.ptr->length; })
      .def_property_readonly("dx", [](const PyGrid& g) { return g.ptr->dx; })
      .def_property_readonly("points",
                             [](const PyGrid& g) {
                               return py::array_t<double>(g.ptr->points.size(), g.ptr->points.data());
                             })
      .def_property_readonly("wavenumbers", [](const PyGrid& g) {
        return py::array_t<double>(g.ptr->wavenumbers.size(), g.ptr->wavenumbers.data());
      });

  m.def(
      "make_grid", [](std::size_t n, double length) { return PyGrid{make_grid(n, length)}; },
      py::arg("n"), py::arg("length") = kTwoPi);

  py::class_<Field>(m, "Field")
      .def(py::init(&field_from_array), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid", [](const Field& f) { return PyGrid{f.grid_ptr()}; })
      .def_property_readonly("values", &array_from_field)
      .def("__len__", &Field::size);

  m.def("deriv", &deriv, py::arg("field"), py::arg("order"));
  m.def("mean", &mean);
  m.def("sobolev_seminorm", &sobolev_seminorm, py::arg("field"), py::arg("s"));
  m.def("l2_norm", &l2_norm);

  py::class_<Params>(m, "Params")
      .def(py::init([](double gamma, double b0, double epsilon) {
             Params p{gamma, b0, epsilon};
             validate_params(p);
             return p;
           }),
           py::arg("gamma") = 1.5, py::arg("b0") = 1.0, py::arg("epsilon") = 0.0)
      .def_readonly("gamma", &Params::gamma)
      .def_readonly("b0", &Params::b0)
      .def_readonly("epsilon", &Params::epsilon);

  py::class_<State>(m, "State")
      .def(py::init([](const Field& rho, const Field& b, double time) {
             return State{rho, b, time};
           }),
           py::arg("rho"), py::arg("b"), py::arg("time") = 0.0)
      .def_property_readonly("rho", [](const State& s) { return array_from_field(s.rho); })
      .def_property_readonly("b", [](const State& s) { return array_from_field(s.b); })
      .def_readonly("time", &State::time);

  m.def(
      "rhs",
      [](const State& s, const Params& p, bool dealias) {
        auto [drho, db] = rhs(s, p, dealias);
        return py::make_tuple(array_from_field(drho), array_from_field(db));
      },
      py::arg("state"), py::arg("params"), py::arg("dealias") = false);
  m.def("velocity", [](const State& s, const Params& p) {
    const Velocity v = velocity(s, p);
    return py::make_tuple(array_from_field(v.ux), array_from_field(v.uz));
  });
  m.def("diffusion_matrix", [](double rho, double b, const Params& p) {
    const Mat2 mt = diffusion_matrix(rho, b, p);
    return py::make_tuple(py::make_tuple(mt.a11, mt.a12), py::make_tuple(mt.a21, mt.a22));
  });

  m.def("eval_f", [](double r, double b, const Params& p) { return ext_value(relaxvars::eval_f(r, b, p)); });
  m.def("eval_g", [](double r, double b, const Params& p) { return ext_value(relaxvars::eval_g(r, b, p)); });
  m.def("eval_w", [](double r, double b, const Params& p) { return ext_value(relaxvars::eval_w(r, b, p)); });
  m.def("eval_z", [](double r, double b, const Params& p) { return ext_value(relaxvars::eval_z(r, b, p)); });
  m.def("eval_W", [](double r, double b, const Params& p) { return relaxvars::eval_W(r, b, p); });
  m.def("eval_Z", [](double r, double b, const Params& p) { return relaxvars::eval_Z(r, b, p); });
  m.def("eval_alpha", [](double r, double b, const Params& p) { return relaxvars::eval_alpha(r, b, p); });
  m.def("eval_beta", [](double r, double b, const Params& p) { return relaxvars::eval_beta(r, b, p); });
  m.def("eval_point", [](double r, double b, const Params& p) {
    const relaxvars::RelaxPoint pt = relaxvars::eval_point(r, b, p);
    py::dict d;
    d["rho"] = pt.rho;
    d["b"] = pt.b;
    d["f"] = ext_value(pt.f);
    d["g"] = ext_value(pt.g);
    d["w"] = ext_value(pt.w);
    d["z"] = ext_value(pt.z);
    d["W"] = pt.bigW;
    d["Z"] = pt.bigZ;
    d["alpha"] = pt.alpha;
    d["beta"] = pt.beta;
    return d;
  });
  m.def("rho_upper_from_w", [](double w0, const Params& p) { return relaxvars::rho_upper_from_w(w0, p); });
  m.def("rho_lower_from_z", [](double z0, const Params& p) { return relaxvars::rho_lower_from_z(z0, p); });
  m.def("b_bound_from_w", [](double w0, const Params& p) { return relaxvars::b_bound_from_w(w0, p); });

  m.def("grad_W", [](double r, double b, const Params& p) {
    const auto d = relaxvars::grad_hess_W(r, b, p);
    return py::make_tuple(d.d_rho, d.d_b);
  });
  m.def("grad_Z", [](double r, double b, const Params& p) {
    const auto d = relaxvars::grad_hess_Z(r, b, p);
    return py::make_tuple(d.d_rho, d.d_b);
  });
  m.def("hess_W", [](double r, double b, const Params& p) {
    const auto d = relaxvars::grad_hess_W(r, b, p);
    return py::make_tuple(d.d_rho_rho, d.d_rho_b, d.d_b_b);
  });
  m.def("hess_Z", [](double r, double b, const Params& p) {
    const auto d = relaxvars::grad_hess_Z(r, b, p);
    return py::make_tuple(d.d_rho_rho, d.d_rho_b, d.d_b_b);
  });

  m.def("zeta_roots", [](double rho_bar, double b_bar, const Params& p) {
    const auto z = relaxvars::zeta_roots(rho_bar, b_bar, p);
    return py::make_tuple(z.zeta1, z.zeta2);
  });

  m.def(
      "level_grid",
      [](const Params& p, double rho_lo, double rho_hi, int n_rho, double b_lo, double b_hi,
         int n_b, const std::string& which) {
        const auto table = relaxvars::level_grid(
            p, rho_lo, rho_hi, n_rho, b_lo, b_hi, n_b,
            which == "Z" ? relaxvars::LevelWhich::Z : relaxvars::LevelWhich::W);
        py::array_t<double> rho(table.size()), b(table.size()), value(table.size());
        py::array_t<int> branch(table.size());
        for (std::size_t i = 0; i < table.size(); ++i) {
          rho.mutable_data()[i] = table[i].rho;
          b.mutable_data()[i] = table[i].b;
          value.mutable_data()[i] = table[i].value;
          branch.mutable_data()[i] = table[i].branch;
        }
        return py::make_tuple(rho, b, value, branch);
      },
      py::arg("params"), py::arg("rho_lo"), py::arg("rho_hi"), py::arg("n_rho"), py::arg("b_lo"),
      py::arg("b_hi"), py::arg("n_b"), py::arg("which") = "W");

  py::class_<StepControl>(m, "StepControl")
      .def(py::init([](double cfl, double dt_min, double dt_max, double t_end, bool dealias) {
             return StepControl{cfl, dt_min, dt_max, t_end, dealias};
           }),
           py::arg("cfl") = 0.5, py::arg("dt_min") = 1e-12,
           py::arg("dt_max") = std::numeric_limits<double>::infinity(), py::arg("t_end") = 0.0,
           py::arg("dealias") = false)
      .def_readonly("cfl", &StepControl::cfl)
      .def_readonly("t_end", &StepControl::t_end);

  m.def("stable_dt", &stable_dt);
  m.def("step", &step, py::arg("state"), py::arg("params"), py::arg("dt"),
        py::arg("dealias") = false);

  m.def("energy", &energy);
  m.def("dissipation", &dissipation);
  m.def(
      "fit_decay",
      [](const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
        const DecayFit f = fit_decay(t, v, lo, hi);
        py::dict d;
        d["rate"] = f.rate;
        d["r_squared"] = f.r_squared;
        d["t_lo"] = f.t_lo;
        d["t_hi"] = f.t_hi;
        d["n_used"] = f.n_used;
        return d;
      },
      py::arg("times"), py::arg("values"), py::arg("t_lo"), py::arg("t_hi"));

  m.def("load_scenario", &builtin_scenario, py::arg("tag"));
  m.def("scenario_names", &builtin_scenario_names);
  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("tag", &RunConfig::tag)
      .def_readwrite("n", &RunConfig::n)
      .def_property(
          "t_end", [](const RunConfig& c) { return c.step.t_end; },
          [](RunConfig& c, double v) { c.step.t_end = v; })
      .def_property(
          "cadence", [](const RunConfig& c) { return c.cadence; },
          [](RunConfig& c, double v) { c.cadence = v; });
  m.def("parse_config", &parse_config_text, py::arg("text"), py::arg("origin") = "<string>");

  m.def(
      "run_scenario",
      [](const RunConfig& cfg) {
        const RunArtifacts art = execute_run(cfg);
        py::list records;
        for (const auto& rp : art.trajectory.records) records.append(record_to_dict(rp.rec));
        py::dict out;
        out["records"] = records;
        out["halting_cause"] = halt_cause_name(art.trajectory.halt);
        out["halt_message"] = art.trajectory.halt_message;
        out["steps"] = art.trajectory.steps;
        out["summary_json"] = summary_to_json(cfg, art.summary);
        return out;
      },
      py::arg("config"));

  m.def(
      "run_audit",
      [](const Params& p, int n_points, std::uint64_t seed) {
        AuditOptions opt;
        opt.n_points = n_points;
        opt.seed = seed;
        const AuditReport rep = run_audit(p, opt);
        return audit_report_json(rep);
      },
      py::arg("params"), py::arg("n_points") = 200, py::arg("seed") = 1);

  m.def("run_converge",
        [](const RunConfig& cfg) { return converge_report_json(run_converge(cfg)); },
        py::arg("config"));
}
