#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasekit/errors.hpp"
#include "phasekit/feedback.hpp"
#include "phasekit/io.hpp"
#include "phasekit/lti.hpp"
#include "phasekit/numrange.hpp"
#include "phasekit/phasecore.hpp"
#include "phasekit/symmetric.hpp"

namespace py = pybind11;
using namespace phasekit;
using namespace phasekit::io;

namespace {

// Reuse the JSON serializers so Python sees exactly what the CLI prints.
py::object to_py(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ToleranceConfig make_tol(double rank_tol, double psd_tol, double recon_tol) {
  ToleranceConfig t{rank_tol, psd_tol, recon_tol};
  t.validate();
  return t;
}

PhaseEnvelope envelope_arg(const py::object& o) {
  if (py::isinstance<PhaseEnvelope>(o)) return o.cast<PhaseEnvelope>();
  return phase_envelope_from_json(from_py(o));
}

}  // namespace

PYBIND11_MODULE(_phasekit, m) {
  m.doc() = "Phase analysis of complex matrices and MIMO LTI feedback loops";

  // leaked on purpose: must outlive interpreter finalization
  static auto* exc = new py::exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::handle(*exc)(py::str(e.what()));
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(exc->ptr(), inst.ptr());
    }
  });

  py::class_<ToleranceConfig>(m, "ToleranceConfig")
      .def(py::init(&make_tol), py::arg("rank_tol") = 1e-10, py::arg("psd_tol") = 1e-10,
           py::arg("recon_tol") = 1e-8)
      .def_readwrite("rank_tol", &ToleranceConfig::rank_tol)
      .def_readwrite("psd_tol", &ToleranceConfig::psd_tol)
      .def_readwrite("recon_tol", &ToleranceConfig::recon_tol);
  const auto tol = py::arg("tol") = ToleranceConfig{};

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init([](RealMatrix A, RealMatrix B, RealMatrix C, RealMatrix D) {
             StateSpace g{std::move(A), std::move(B), std::move(C), std::move(D)};
             g.validate();
             return g;
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"))
      .def_readonly("A", &StateSpace::A)
      .def_readonly("B", &StateSpace::B)
      .def_readonly("C", &StateSpace::C)
      .def_readonly("D", &StateSpace::D)
      .def_property_readonly("order", &StateSpace::order)
      .def_property_readonly("size", &StateSpace::size)
      .def_static("gain", &StateSpace::gain, py::arg("D"))
      .def_static("from_json", [](const py::object& o) { return system_from_json(from_py(o)); })
      .def("to_json", [](const StateSpace& g) { return to_py(system_to_json(g)); })
      .def("__call__", [](const StateSpace& g, Complex s) { return eval(g, s); }, py::arg("s"));

  m.def("tf", &tf, py::arg("num"), py::arg("den"));
  m.def("append", &append);
  m.def("series", &series);
  m.def("scale", &scale, py::arg("h"), py::arg("M"));
  m.def("minimal_realization", &minimal_realization, py::arg("G"), tol);
  m.def("is_stable", &is_stable, py::arg("G"), tol);
  m.def("hinf_norm", [](const StateSpace& g, const ToleranceConfig& t) {
    const HinfResult h = hinf_norm(g, t);
    return py::make_tuple(h.value, h.omega);
  }, py::arg("G"), tol);
  m.def("phi_inf_sector", [](const StateSpace& g, const ToleranceConfig& t) {
    const PhaseInterval s = phi_inf_sector(g, t);
    return py::make_tuple(s.low, s.high);
  }, py::arg("G"), tol);

  // matrices
  m.def("classify", [](const ComplexMatrix& C, const ToleranceConfig& t) { return to_py(to_json(classify(C, t))); },
        py::arg("C"), tol);
  m.def("zero_location", [](const ComplexMatrix& C, const ToleranceConfig& t) {
    return std::string(to_string(zero_location(C, t)));
  }, py::arg("C"), tol);
  m.def("phases", [](const ComplexMatrix& C, const ToleranceConfig& t) { return phases(C, std::nullopt, t).phases; },
        py::arg("C"), tol);
  m.def("decompose", [](const ComplexMatrix& C, const ToleranceConfig& t) {
    const SectorialDecomposition d = decompose(C, t);
    py::dict r = to_py(to_json(d));
    r["T"] = d.T;
    r["core"] = d.core();
    return r;
  }, py::arg("C"), tol);
  m.def("takagi", [](const ComplexMatrix& C, const ToleranceConfig& t) {
    const TakagiFactorization f = takagi(C, t);
    return py::make_tuple(f.U, f.sigma);
  }, py::arg("C"), tol);
  m.def("real_congruence_decompose", [](const ComplexMatrix& C, const ToleranceConfig& t) {
    const RealCongruenceDecomposition d = real_congruence_decompose(C, t);
    py::dict r = to_py(to_json(d));
    r["T"] = d.T;
    r["core"] = d.core();
    return r;
  }, py::arg("C"), tol);
  m.def("matrix_small_phase_check", [](const ComplexMatrix& A, double alpha, double beta, const ToleranceConfig& t) {
    const MatrixCheck c = matrix_small_phase_check(A, alpha, beta, t);
    return py::make_tuple(c.holds, c.witness);
  }, py::arg("A"), py::arg("alpha"), py::arg("beta"), tol);

  // feedback
  py::class_<PhaseEnvelope>(m, "PhaseEnvelope")
      .def(py::init([](const std::vector<std::tuple<double, double, double>>& pts) {
             std::vector<EnvelopePoint> v;
             for (const auto& [w, a, b] : pts) v.push_back({w, a, b});
             return PhaseEnvelope(std::move(v));
           }),
           py::arg("points"))
      .def_static("constant", &PhaseEnvelope::constant, py::arg("alpha"), py::arg("beta"));

  m.def("is_feedback_stable", &is_feedback_stable, py::arg("G"), py::arg("H"), tol);
  m.def("certify_small_phase", [](const StateSpace& g, const StateSpace& h, const ToleranceConfig& t) {
    return to_py(to_json(certify_small_phase(g, h, t)));
  }, py::arg("G"), py::arg("H"), tol);
  m.def("certify_small_gain", [](const StateSpace& g, const StateSpace& h, const ToleranceConfig& t) {
    return to_py(to_json(certify_small_gain(g, h, t)));
  }, py::arg("G"), py::arg("H"), tol);
  m.def("synthesize_destabilizer", [](const StateSpace& g, const py::object& env, const ToleranceConfig& t) {
    const DestabilizerReport r = synthesize_destabilizer_symmetric(g, envelope_arg(env), t);
    py::dict d = to_py(to_json(r));
    d["H"] = py::cast(r.H);
    return d;
  }, py::arg("G"), py::arg("envelope"), tol);
}
