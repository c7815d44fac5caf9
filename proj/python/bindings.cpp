#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gmom/harness.hpp"

namespace py = pybind11;
using namespace gmom;

namespace {

CliConfig config_from_kwargs(const py::kwargs& kwargs) {
  std::ostringstream doc;
  doc << "{";
  bool first = true;
  for (auto item : kwargs) {
    if (!first) doc << ", ";
    first = false;
    std::string key = std::string(py::str(item.first));
    // `lambda` is reserved in python; accept the conventional trailing
    // underscore spelling for it.
    if (key == "lambda_") key = "lambda";
    doc << key << ": ";
    if (py::isinstance<py::list>(item.second) ||
        py::isinstance<py::tuple>(item.second)) {
      doc << "[";
      bool inner_first = true;
      for (auto v : py::cast<py::sequence>(item.second)) {
        if (!inner_first) doc << ", ";
        inner_first = false;
        doc << std::string(py::repr(v));
      }
      doc << "]";
    } else if (py::isinstance<py::bool_>(item.second)) {
      doc << (py::cast<bool>(item.second) ? "true" : "false");
    } else {
      doc << std::string(py::str(item.second));
    }
  }
  doc << "}";
  return parse_config_text(doc.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "generalized momentum methods: maps, schedules, runs, flows";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError",
                                          PyExc_RuntimeError);

  py::class_<MirrorMap>(m, "MirrorMap")
      .def_static("euclidean", &MirrorMap::euclidean, py::arg("mu"))
      .def_static("euclidean_ball", &MirrorMap::euclidean_ball, py::arg("mu"),
                  py::arg("radius"))
      .def_static("entropy_simplex", &MirrorMap::entropy_simplex,
                  py::arg("mu"))
      .def_static("squared_p_norm", &MirrorMap::squared_p_norm, py::arg("mu"),
                  py::arg("p"))
      .def_property_readonly("mu", &MirrorMap::mu)
      .def_property_readonly("modulus", &MirrorMap::modulus)
      .def_property_readonly(
          "geometry",
          [](const MirrorMap& map) { return geometry_name(map.geometry()); })
      .def("value", &MirrorMap::value)
      .def("conjugate_value", &MirrorMap::conjugate_value)
      .def("conjugate_grad", &MirrorMap::conjugate_grad)
      .def("primal_to_dual", &MirrorMap::primal_to_dual)
      .def("bregman_dual", &MirrorMap::bregman_dual)
      .def("bregman_primal", &MirrorMap::bregman_primal);

  py::class_<Objective>(m, "Objective")
      .def_readonly("name", &Objective::name)
      .def_readonly("dim", &Objective::dim)
      .def_readonly("smoothness", &Objective::smoothness)
      .def_readonly("weak_convexity", &Objective::weak_convexity)
      .def_readonly("optimum_value", &Objective::optimum_value)
      .def("value", [](const Objective& f, const Vector& x) {
        return f.value(x);
      })
      .def("gradient", [](const Objective& f, const Vector& x) {
        return f.gradient(x);
      });

  m.def("make_quadratic", &make_quadratic, py::arg("dim"), py::arg("kappa"),
        py::arg("seed") = 0);
  m.def("make_logistic", &make_logistic, py::arg("n_samples"), py::arg("dim"),
        py::arg("seed"), py::arg("ridge") = 1e-3);

  py::class_<Schedule>(m, "Schedule")
      .def_readonly("k_max", &Schedule::k_max)
      .def_readonly("a", &Schedule::a)
      .def_readonly("A", &Schedule::A)
      .def_readonly("h", &Schedule::h)
      .def_readonly("H", &Schedule::H)
      .def_readonly("b", &Schedule::b)
      .def_readonly("B", &Schedule::B);

  m.def(
      "build_schedule",
      [](double lambda, double c, double mu, double L, int k_max) {
        return build_schedule({lambda, c, mu, L, 1.0}, k_max);
      },
      py::arg("lambda_"), py::arg("c"), py::arg("mu"), py::arg("L"),
      py::arg("k_max"));

  py::class_<Trace>(m, "Trace")
      .def_property_readonly(
          "method", [](const Trace& tr) { return method_name(tr.method); })
      .def_readonly("f_y", &Trace::f_y)
      .def_readonly("f_x", &Trace::f_x)
      .def_readonly("grad_dual", &Trace::grad_dual)
      .def_readonly("min_grad_sq", &Trace::min_grad_sq)
      .def_readonly("gap", &Trace::gap)
      .def_readonly("c_f", &Trace::c_f)
      .def_readonly("c", &Trace::c)
      .def_readonly("e", &Trace::e)
      .def_readonly("x", &Trace::x)
      .def_readonly("y", &Trace::y)
      .def_readonly("z", &Trace::z)
      .def_readonly("xhat", &Trace::xhat)
      .def_property_readonly("steps", &Trace::steps)
      .def("csv", [](const Trace& tr) {
        std::ostringstream os;
        emit_trace(tr, os);
        return os.str();
      });

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("t", &Trajectory::t)
      .def_readonly("f_x", &Trajectory::f_x)
      .def_readonly("x", &Trajectory::x)
      .def_readonly("z", &Trajectory::z)
      .def_property_readonly("samples", &Trajectory::samples)
      .def("conserved", [](const Trajectory& traj) {
        return conserved_cf(traj);
      })
      .def("energy", [](const Trajectory& traj) {
        return hamiltonian_energy(traj);
      });

  m.def("run", [](const py::kwargs& kwargs) {
    CliConfig cfg = config_from_kwargs(kwargs);
    cfg.command = "run";
    return execute_run(cfg);
  });
  m.def("simulate", [](const py::kwargs& kwargs) {
    CliConfig cfg = config_from_kwargs(kwargs);
    cfg.command = "simulate";
    return execute_simulation(cfg);
  });
  m.def(
      "fit_rate",
      [](const Trace& tr, const std::string& column, double tail) {
        TraceColumn col = column == "gap" ? TraceColumn::Gap
                                          : TraceColumn::MinGradSq;
        auto fit = fit_rate(tr, col, tail);
        return fit ? std::optional<double>(fit->slope) : std::nullopt;
      },
      py::arg("trace"), py::arg("column") = "gap", py::arg("tail") = 0.5);
  m.def("structural_identity_residual", &structural_identity_residual,
        py::arg("trace"), py::arg("k"));
  m.def(
      "check",
      [](const std::string& suite) {
        std::ostringstream os;
        int failures = run_checks(suite, os);
        return py::make_tuple(failures, os.str());
      },
      py::arg("suite") = "all");
  m.def("serialize_config", [](const py::kwargs& kwargs) {
    return serialize_config(config_from_kwargs(kwargs));
  });
}
