#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isodamp/pipeline.hpp"
#include "isodamp/routh.hpp"
#include "isodamp/sim.hpp"

namespace py = pybind11;
using namespace isodamp;

namespace {

StageKind kind_of(const std::string& name) { return stage_kind_from_string(name); }

std::string pipeline(PipelineResult (*run)(const ProjectConfig&), const std::string& text) {
    const ProjectConfig config = parse_config(text);
    PipelineResult r = run(config);
    r.payload["config_hash"] = config_hash(config);
    r.payload["exit_code"] = r.exit_code;
    return r.payload.dump();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    auto base = py::register_exception<Error>(m, "IsodampError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<InfeasibleDesign>(m, "InfeasibleDesign", base.ptr());
    py::register_exception<SimulationDiverged>(m, "SimulationDiverged", base.ptr());

    m.def("alpha_from_order", &alpha_from_order, py::arg("q"));
    m.def("order_from_alpha", &order_from_alpha, py::arg("alpha"));
    m.def(
        "realize",
        [](const std::string& kind, double q, double a, double gain_k) {
            const TransferFunction tf = realize_first_order(FoStage::from_order(kind_of(kind), q, a, gain_k));
            return py::make_tuple(tf.num().coeffs(), tf.den().coeffs());
        },
        py::arg("kind"), py::arg("q"), py::arg("a") = 0.0, py::arg("gain_k") = 1.0);
    m.def(
        "peak_frequency",
        [](const std::string& kind, double q, double a, double gain_k) {
            return peak_frequency(FoStage::from_order(kind_of(kind), q, a, gain_k));
        },
        py::arg("kind"), py::arg("q"), py::arg("a") = 0.0, py::arg("gain_k") = 1.0);
    m.def(
        "is_hurwitz", [](const std::vector<double>& c) { return is_hurwitz(Polynomial(c)); }, py::arg("coeffs"));
    m.def(
        "marginal_gain",
        [](const std::vector<double>& base, const std::vector<double>& gain, double k_lo, double k_hi) -> py::object {
            const Polynomial p0(base), p1(gain);
            const auto r = marginal_gain([&](double k) { return p0 + k * p1; }, k_lo, k_hi);
            if (r.kind == MarginalGainResult::Kind::finite) return py::float_(r.k_m);
            return py::str(r.kind == MarginalGainResult::Kind::unbounded ? "unbounded" : "zero");
        },
        py::arg("base"), py::arg("gain"), py::arg("k_lo") = 0.1, py::arg("k_hi") = 1e4);
    m.def(
        "step_response",
        [](const std::vector<double>& num, const std::vector<double>& den, double delay, double t_final, double dt) {
            const StepSeries s = step_response(TransferFunction(Polynomial(num), Polynomial(den), delay), t_final, dt);
            return py::make_tuple(s.t, s.y);
        },
        py::arg("num"), py::arg("den"), py::arg("delay") = 0.0, py::arg("t_final") = 20.0, py::arg("dt") = 1e-3);
    m.def(
        "overshoot_pct",
        [](const std::vector<double>& num, const std::vector<double>& den, double delay, double t_final, double dt) {
            return overshoot(step_response(TransferFunction(Polynomial(num), Polynomial(den), delay), t_final, dt))
                .overshoot_pct;
        },
        py::arg("num"), py::arg("den"), py::arg("delay") = 0.0, py::arg("t_final") = 20.0, py::arg("dt") = 1e-3);
    m.def("analyze", [](const std::string& t) { return pipeline(run_analyze, t); }, py::arg("config_json"));
    m.def("design", [](const std::string& t) { return pipeline(run_design, t); }, py::arg("config_json"));
    m.def("simulate", [](const std::string& t) { return pipeline(run_simulate, t); }, py::arg("config_json"));
}
