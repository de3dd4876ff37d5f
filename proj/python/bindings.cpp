#include <map>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "icflow/experiments.hpp"
#include "icflow/flow.hpp"
#include "icflow/functionals.hpp"
#include "icflow/generate.hpp"
#include "icflow/io.hpp"

namespace py = pybind11;
using namespace icflow;

PYBIND11_MODULE(_icflow, m)
{
    m.doc() = "Inverse curvature flow in 2-D space forms";

    py::class_<SpaceForm>(m, "SpaceForm")
        .def(py::init<int>(), py::arg("K"))
        .def_property_readonly("K", &SpaceForm::K)
        .def_property_readonly("r_max", &SpaceForm::r_max)
        .def("warp", [](const SpaceForm& sf, double r) {
            const auto w = sf.warp(r);
            return py::make_tuple(w.phi, w.phi_prime, w.Phi);
        })
        .def("inverse_warp", &SpaceForm::inverse_warp);

    py::class_<RadialCurve>(m, "RadialCurve")
        .def(py::init<SpaceForm, std::vector<double>, int>(), py::arg("space"), py::arg("rho"),
             py::arg("stencil_order") = 4)
        .def_property_readonly("K", [](const RadialCurve& c) { return c.space().K(); })
        .def_property_readonly("rho", [](const RadialCurve& c) { return std::vector<double>(c.rho().begin(), c.rho().end()); })
        .def("__len__", &RadialCurve::size)
        .def("to_csv", [](const RadialCurve& c) {
            std::ostringstream os;
            write_curve_csv(os, c);
            return os.str();
        });

    m.def("from_csv", [](const std::string& text, int order) {
        std::istringstream is(text);
        return read_curve_csv(is, order);
    }, py::arg("text"), py::arg("stencil_order") = 4);

    m.def("length", py::overload_cast<const RadialCurve&>(&length));
    m.def("area", py::overload_cast<const RadialCurve&>(&area));
    m.def("curvature", [](const RadialCurve& c) { return fields(c).kappa; });
    m.def("minkowski_residual", py::overload_cast<const RadialCurve&>(&minkowski_residual));
    m.def("hk_gap", py::overload_cast<const RadialCurve&>(&hk_gap));
    m.def("weighted_margin", py::overload_cast<const RadialCurve&>(&weighted_margin));
    m.def("corollary_margin", py::overload_cast<const RadialCurve&>(&corollary_margin));
    m.def("nonconvex_margin", py::overload_cast<const RadialCurve&>(&nonconvex_margin));
    m.def("report_json", [](const RadialCurve& c) { return to_json(make_report(c)).dump(); });
    m.def("gp_certificate", [](const RadialCurve& c) {
        const auto g = gp_counterexample_gap(c);
        return py::dict(py::arg("y0") = g.y0, py::arg("F") = g.F, py::arg("bound") = g.bound, py::arg("gap") = g.gap);
    });

    m.def("rhs", [](const RadialCurve& c, const std::string& law) { return rhs(c, parse_speed_law(law)); },
          py::arg("curve"), py::arg("law") = "constrained");
    m.def("fourier_curve", [](int K, std::size_t N, double r0, const std::string& modes) {
        CurveSpec spec;
        spec.kind = CurveKind::Fourier;
        spec.r0 = r0;
        spec.modes = parse_modes(modes);
        return generate(spec, SpaceForm(K), N);
    }, py::arg("K"), py::arg("N"), py::arg("r0"), py::arg("modes"));
    m.def("random_curve", [](int K, std::size_t N, std::uint64_t seed) {
        CurveSpec spec;
        spec.kind = CurveKind::Random;
        spec.seed = seed;
        return generate(spec, SpaceForm(K), N);
    }, py::arg("K"), py::arg("N"), py::arg("seed"));

    m.def("run_flow_json", [](const RadialCurve& c0, const std::string& law, double t_end, double eps_stationary) {
        FlowConfig cfg;
        cfg.t_end = t_end;
        cfg.eps_stationary = eps_stationary;
        const auto trace = [&] {
            py::gil_scoped_release release;
            return run(c0, parse_speed_law(law), cfg);
        }();
        return trace_summary(trace).dump();
    }, py::arg("curve"), py::arg("law") = "constrained", py::arg("t_end") = 100.0, py::arg("eps_stationary") = 1e-9);

    m.def("run_command", [](const std::string& name, const std::map<std::string, std::string>& settings,
                            const std::filesystem::path& out) {
        ExperimentConfig cfg;
        for (const auto& [k, v] : settings) cfg.set(k, v);
        std::ostringstream log, err;
        int code;
        {
            py::gil_scoped_release release;
            code = run_command(name, cfg, out, log, err);
        }
        return py::make_tuple(code, log.str(), err.str());
    }, py::arg("name"), py::arg("settings"), py::arg("out"));
}
