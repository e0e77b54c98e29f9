#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "gisfa/amplitudes.hpp"
#include "gisfa/atomic_model.hpp"
#include "gisfa/config.hpp"
#include "gisfa/errors.hpp"
#include "gisfa/observables.hpp"
#include "gisfa/pulse.hpp"
#include "gisfa/runner.hpp"

namespace py = pybind11;
using namespace gisfa;

namespace {

MomentumPoint point(double pz, double pt) { return MomentumPoint{pz, pt}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photodetachment amplitudes in few-cycle pulses";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def("omega_from_period_as", &omega_from_period_as);
  m.def("omega_from_wavelength_nm", &omega_from_wavelength_nm);

  py::class_<PulseParams>(m, "PulseParams")
      .def(py::init([](double cep) { return PulseParams::defaults(cep); }), py::arg("cep") = 0.0)
      .def_readwrite("E0", &PulseParams::E0)
      .def_readwrite("omega", &PulseParams::omega)
      .def_readwrite("cep", &PulseParams::cep)
      .def_readwrite("tau", &PulseParams::tau)
      .def_readwrite("t_start", &PulseParams::t_start)
      .def_readwrite("t_end", &PulseParams::t_end)
      .def("validate", &PulseParams::validate);

  m.def("vector_potential", &vector_potential, py::arg("t"), py::arg("params"));
  m.def("electric_field", &electric_field, py::arg("t"), py::arg("params"));
  m.def("intensity_fwhm", &intensity_fwhm_numeric, py::arg("params"));

  py::class_<PulseTables>(m, "PulseTables")
      .def(py::init([](const PulseParams& p, std::size_t n) { return PulseTables::build(p, n); }),
           py::arg("params"), py::arg("n_steps") = PulseTables::kDefaultSteps)
      .def_property_readonly("params", &PulseTables::params)
      .def_property_readonly("t_start", &PulseTables::t_start)
      .def_property_readonly("t_end", &PulseTables::t_end)
      .def_property_readonly("alpha_total", &PulseTables::alpha_total)
      .def_property_readonly("beta_total", &PulseTables::beta_total)
      .def("A", &PulseTables::A)
      .def("alpha", &PulseTables::alpha)
      .def("beta", &PulseTables::beta);

  py::class_<PotentialParams>(m, "PotentialParams")
      .def(py::init<>())
      .def(py::init([](double d, double g, double mu) { return PotentialParams{d, g, mu}; }),
           py::arg("d"), py::arg("g"), py::arg("mu"))
      .def_readwrite("d", &PotentialParams::d)
      .def_readwrite("g", &PotentialParams::g)
      .def_readwrite("mu", &PotentialParams::mu);

  m.def("potential", &potential_value, py::arg("r"), py::arg("params"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("r_max", &SolverConfig::r_max)
      .def_readwrite("step", &SolverConfig::step);

  py::class_<BoundState>(m, "BoundState")
      .def_readonly("energy", &BoundState::energy)
      .def_property_readonly("kappa", &BoundState::kappa)
      .def_property_readonly("norm", &BoundState::norm)
      .def_property_readonly("interior_nodes", &BoundState::interior_nodes);

  m.def("solve_bound_state", &solve_bound_state, py::arg("params") = PotentialParams{},
        py::arg("config") = SolverConfig{});

  py::class_<MomentumTables>(m, "MomentumTables")
      .def(py::init([](const BoundState& s, const PotentialParams& p) { return MomentumTables::build(s, p); }),
           py::arg("state"), py::arg("params") = PotentialParams{})
      .def_property_readonly("norm", &MomentumTables::norm)
      .def("phi0", &MomentumTables::phi0)
      .def("w", &MomentumTables::w);

  py::class_<QuadratureSpec>(m, "QuadratureSpec")
      .def(py::init<>())
      .def(py::init([](int n_t, int n_qz, int n_qt) {
             QuadratureSpec s;
             s.n_t = n_t;
             s.n_qz = n_qz;
             s.n_qt = n_qt;
             return s;
           }),
           py::arg("n_t"), py::arg("n_qz"), py::arg("n_qt"))
      .def_readwrite("n_t", &QuadratureSpec::n_t)
      .def_readwrite("qz_max", &QuadratureSpec::qz_max)
      .def_readwrite("n_qz", &QuadratureSpec::n_qz)
      .def_readwrite("qt_max", &QuadratureSpec::qt_max)
      .def_readwrite("n_qt", &QuadratureSpec::n_qt);

  py::enum_<SfaVariant>(m, "SfaVariant")
      .value("full", SfaVariant::full)
      .value("potential_only", SfaVariant::potential_only);

  // tables are held by reference
  py::class_<AmplitudeEngine>(m, "AmplitudeEngine")
      .def(py::init<const PulseTables&, const MomentumTables&, const PotentialParams&, const QuadratureSpec&>(),
           py::arg("pulse"), py::arg("momenta"), py::arg("potential") = PotentialParams{},
           py::arg("spec") = QuadratureSpec{}, py::keep_alive<1, 2>(), py::keep_alive<1, 3>())
      .def_property_readonly("energy", &AmplitudeEngine::energy)
      .def("m0", [](const AmplitudeEngine& e, double pz, double pt) { return e.m0(point(pz, pt)); },
           py::arg("pz"), py::arg("pt") = 0.0)
      .def("m0_in_gauge",
           [](const AmplitudeEngine& e, double pz, double pt, double gamma) {
             return e.m0_in_gauge(point(pz, pt), GaugeParam{gamma});
           },
           py::arg("pz"), py::arg("pt") = 0.0, py::arg("gamma") = 0.0)
      .def("m1",
           [](const AmplitudeEngine& e, double pz, double pt) {
             Estimate r;
             {
               py::gil_scoped_release release;
               r = e.m1_estimate(point(pz, pt));
             }
             return py::make_tuple(r.value, r.error);
           },
           py::arg("pz"), py::arg("pt") = 0.0, "(value, error)")
      .def("sfa",
           [](const AmplitudeEngine& e, double pz, double pt, double gamma, SfaVariant v) {
             const Estimate r = e.sfa(point(pz, pt), GaugeParam{gamma}, v);
             return py::make_tuple(r.value, r.error);
           },
           py::arg("pz"), py::arg("pt") = 0.0, py::arg("gamma") = 0.0, py::arg("variant") = SfaVariant::full,
           "(value, error)");

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("E0", &RunConfig::E0)
      .def_readwrite("omega", &RunConfig::omega)
      .def_readwrite("tau", &RunConfig::tau)
      .def_readwrite("ceps", &RunConfig::ceps)
      .def_readwrite("gammas", &RunConfig::gammas)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("run_name", &RunConfig::run_name)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("gauge_audit_points", &RunConfig::gauge_audit_points)
      .def("pulse", &RunConfig::pulse, py::arg("cep"));

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("echo_config", &echo_config, py::arg("config"));
  m.def(
      "run",
      [](const RunConfig& c, bool resume) {
        RunOptions o;
        o.resume = resume;
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run(c, o);
        }
        return py::make_tuple(s.complete, s.files, s.summary_path);
      },
      py::arg("config"), py::arg("resume") = false, "(complete, files, summary_path)");
  m.def("check_gauge", [](const RunConfig& c) {
    std::ostringstream out;
    const bool ok = check_gauge(c, out).passed();
    return py::make_tuple(ok, out.str());
  });
}
