#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tractdyn/acceptance.hpp"
#include "tractdyn/bottcher.hpp"
#include "tractdyn/io.hpp"
#include "tractdyn/linearizer.hpp"
#include "tractdyn/parallel.hpp"
#include "tractdyn/poly_dynamics.hpp"
#include "tractdyn/spectrum.hpp"
#include "tractdyn/transfer.hpp"

namespace py = pybind11;
using namespace tractdyn;

PYBIND11_MODULE(_tractdyn, m) {
  m.doc() = "Thermodynamic formalism for entire functions of bounded type";

  static py::exception<Error> error(m, "TractdynError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(std::string(to_string(e.kind())), e.what()).ptr());
    }
  });

  m.def("set_thread_count", &set_thread_count);
  m.def("thread_count", &thread_count);

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init([](const std::string& s) { return Polynomial::parse_shorthand(s); }))
      .def(py::init<std::vector<Complex>>())
      .def_property_readonly("degree", &Polynomial::degree)
      .def("__call__", &Polynomial::operator())
      .def("escape_radius", &Polynomial::escape_radius)
      .def("__repr__", [](const Polynomial& p) { return "Polynomial('" + p.to_shorthand() + "')"; });

  m.def("preimages", &preimages);
  m.def(
      "tree_pressure",
      [](const Polynomial& p, double t, Complex w, int depth) {
        return tree_pressure(p, t, w, depth).value;
      },
      py::arg("p"), py::arg("t"), py::arg("w"), py::arg("depth"));
  m.def(
      "bowen_zero_poly",
      [](const Polynomial& p, int depth) { return bowen_zero_poly(p, depth).value; },
      py::arg("p"), py::arg("depth") = 14);

  py::class_<KoenigsLinearizer>(m, "KoenigsLinearizer")
      .def(py::init([](const Polynomial& p, std::optional<Complex> z0, Complex kappa) {
             return KoenigsLinearizer(p, z0 ? *z0 : default_koenigs_point(p), kappa);
           }),
           py::arg("p"), py::arg("z0") = py::none(), py::arg("kappa") = Complex(1.0))
      .def_property_readonly("multiplier", &KoenigsLinearizer::lambda)
      .def_property_readonly("kappa", &KoenigsLinearizer::kappa)
      .def("__call__", &KoenigsLinearizer::operator())
      .def("derivative", &KoenigsLinearizer::derivative)
      .def("disjoint_type", &make_disjoint_type, py::arg("R"));

  py::class_<BottcherMap>(m, "BottcherMap")
      .def(py::init<Polynomial>())
      .def("__call__", &BottcherMap::operator());

  py::class_<TractBranch>(m, "Tract")
      .def_property_readonly("index", &TractBranch::index)
      .def_property_readonly("log_scale", &TractBranch::log_scale)
      .def("phi", &TractBranch::phi)
      .def("phi_derivative", &TractBranch::phi_derivative)
      .def("boundary", [](const TractBranch& b, double T, int n) {
        return trace_boundary(b, T, n).polyline;
      }, py::arg("T"), py::arg("n_points") = 400);

  py::class_<TractAtlas>(m, "Atlas")
      .def(py::init([](const std::string& f, double R) { return find_tracts(parse_function(f), R); }),
           py::arg("function"), py::arg("R") = std::exp(1.0))
      .def_readonly("radius", &TractAtlas::radius)
      .def_readonly("tracts", &TractAtlas::tracts)
      .def_property_readonly("descriptor", [](const TractAtlas& a) { return a.function.descriptor(); })
      .def("transfer", [](const TractAtlas& a, double t, Complex w, int k_budget) {
        TransferOptions o;
        o.k_budget = k_budget;
        const TransferSample s = transfer_apply_point(a, t, w, o);
        py::dict d;
        d["value"] = s.value;
        d["partial_sum"] = s.partial_sum;
        d["tail_estimate"] = s.tail_estimate;
        d["terms_used"] = s.terms_used;
        d["blocks"] = s.blocks;
        return d;
      }, py::arg("t"), py::arg("w"), py::arg("k_budget") = (1 << 14) - 1)
      .def("pressure", [](const TractAtlas& a, double t, std::optional<Complex> w, int n_max) {
        return pressure_entire(a, t, w ? *w : default_transfer_point(a), n_max).value;
      }, py::arg("t"), py::arg("w") = py::none(), py::arg("n_max") = 3)
      .def("spectrum", [](const TractAtlas& a, std::vector<double> ts, int j_min, int j_max) {
        SpectrumOptions o;
        o.j_min = j_min;
        o.j_max = j_max;
        const SpectrumCurve c = AtlasSpectrum(a, o).curve(ts);
        py::dict d;
        d["t"] = c.t_grid;
        d["beta_inf"] = c.beta_inf;
        d["b_inf"] = c.b_inf;
        d["drift"] = c.drift;
        d["theta_hat"] = c.theta_found ? py::cast(c.theta_hat) : py::none();
        return d;
      }, py::arg("t_grid"), py::arg("j_min") = 3, py::arg("j_max") = 14);

  m.def("verify", [](std::vector<int> only, std::uint64_t seed) {
    AcceptanceOptions o;
    o.only = std::move(only);
    o.seed = seed;
    const auto r = run_acceptance(o);
    return py::make_tuple(all_passed(r, false), format_report(r, false));
  }, py::arg("only") = std::vector<int>{}, py::arg("seed") = 0);
}
