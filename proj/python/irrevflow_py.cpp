// Python bindings for grids, states, the Lyapunov operator, the irreversible
// semigroup, Hardy-space operations, oracles and the experiment runner.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irrevflow/oracles.hpp"
#include "irrevflow/runner.hpp"

namespace py = pybind11;
using namespace irrevflow;

namespace {

StateSpec state_spec(const std::string& family, double rate, double center, double width, double slope,
                     std::uint64_t seed)
{
    StateSpec s;
    s.family = parse_family(family);
    s.rate = rate;
    s.center = center;
    s.width = width;
    s.slope = slope;
    s.seed = seed;
    return s;
}

// Round trip through text keeps the key order of the report.
py::object to_python(const nlohmann::ordered_json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& o)
{
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(irrevflow, m)
{
    m.doc() = "Lyapunov operator, irreversible semigroup and time observable on discretized grids";
    m.attr("__version__") = version;

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<not_positive_semidefinite>(m, "NotPositiveSemidefinite", PyExc_ArithmeticError);
    py::register_exception<not_projector_like>(m, "NotProjectorLike", PyExc_ArithmeticError);

    py::class_<EnergyGrid, std::shared_ptr<EnergyGrid>>(m, "EnergyGrid")
        .def_readonly("e_max", &EnergyGrid::e_max)
        .def_readonly("n", &EnergyGrid::n)
        .def_readonly("nodes", &EnergyGrid::nodes)
        .def_readonly("weights", &EnergyGrid::weights)
        .def_property_readonly("rule", [](const EnergyGrid& g) { return rule_name(g.rule); })
        .def_property_readonly("spacing", &EnergyGrid::spacing);
    m.def(
        "energy_grid",
        [](double e_max, int n, const std::string& rule) {
            return std::const_pointer_cast<EnergyGrid>(make_energy_grid(e_max, n, parse_rule(rule)));
        },
        py::arg("e_max"), py::arg("n"), py::arg("rule") = "trapezoid");

    py::class_<LineGrid, std::shared_ptr<LineGrid>>(m, "LineGrid")
        .def_readonly("l", &LineGrid::l)
        .def_readonly("n", &LineGrid::n)
        .def_readonly("spacing", &LineGrid::spacing)
        .def_property_readonly("nodes", &LineGrid::nodes);
    m.def("line_grid", [](double l, int n) { return std::const_pointer_cast<LineGrid>(make_line_grid(l, n)); },
          py::arg("l"), py::arg("n"));
    m.def(
        "aligned_line_grid",
        [](const EnergyGrid& e, double l_min) { return std::const_pointer_cast<LineGrid>(aligned_line_grid(e, l_min)); },
        py::arg("energy"), py::arg("l_min") = 200.0);

    py::class_<BridgeConfig>(m, "Bridge")
        .def_property_readonly("energy", [](const BridgeConfig& b) { return std::const_pointer_cast<EnergyGrid>(b.energy); })
        .def_property_readonly("line", [](const BridgeConfig& b) { return std::const_pointer_cast<LineGrid>(b.line); });
    m.def(
        "bridge",
        [](std::shared_ptr<EnergyGrid> e, std::shared_ptr<LineGrid> l, const std::string& interp) {
            return make_bridge(e, l, interp == "linear" ? Interpolation::linear : Interpolation::nearest);
        },
        py::arg("energy"), py::arg("line"), py::arg("interpolation") = "nearest");

    py::class_<EnergyState>(m, "EnergyState")
        .def_property_readonly("grid", [](const EnergyState& s) { return std::const_pointer_cast<EnergyGrid>(s.grid); })
        .def_readonly("amplitudes", &EnergyState::amplitudes)
        .def("norm", &EnergyState::norm)
        .def("evolve", [](const EnergyState& s, double t) { return evolve(s, t); }, py::arg("t"))
        .def("orthonormal", [](const EnergyState& s) { return to_orthonormal(s); });
    m.def(
        "state",
        [](std::shared_ptr<EnergyGrid> g, Eigen::VectorXcd a) { return make_state(g, std::move(a)); },
        py::arg("grid"), py::arg("amplitudes"));
    m.def(
        "family_state",
        [](std::shared_ptr<EnergyGrid> g, const std::string& family, double rate, double center, double width,
           double slope, std::uint64_t seed) {
            return make_family_state(state_spec(family, rate, center, width, slope, seed), g);
        },
        py::arg("grid"), py::arg("family") = "exp-decay", py::arg("rate") = 1.0, py::arg("center") = 10.0,
        py::arg("width") = 2.0, py::arg("slope") = 0.0, py::arg("seed") = 0);
    m.def("inner_product", &inner_product, py::arg("a"), py::arg("b"));

    py::class_<OperatorMatrix>(m, "Operator")
        .def_property_readonly("grid", [](const OperatorMatrix& o) { return std::const_pointer_cast<EnergyGrid>(o.grid); })
        .def_readonly("entries", &OperatorMatrix::entries)
        .def("apply", &OperatorMatrix::apply)
        .def("expectation", &OperatorMatrix::expectation)
        .def("adjoint", &OperatorMatrix::adjoint);

    m.def(
        "build_mf_cauchy",
        [](std::shared_ptr<EnergyGrid> g, double epsilon) {
            RegularizationPolicy p;
            if (epsilon > 0) {
                p.kind = RegularizationPolicy::Kind::epsilon_shift;
                p.epsilon = epsilon;
            }
            return build_mf_cauchy(g, p);
        },
        py::arg("grid"), py::arg("epsilon") = 0.0,
        "Kernel discretization; epsilon > 0 selects the shifted kernel instead of the principal value.");
    m.def("build_mf_composed", &build_mf_composed, py::arg("bridge"));
    m.def("lyapunov_trajectory", &lyapunov_trajectory, py::arg("mf"), py::arg("psi"), py::arg("times"));
    m.def("max_increment", &max_increment, py::arg("values"));

    py::class_<LambdaFactor>(m, "LambdaFactor")
        .def_readonly("eigenvalues", &LambdaFactor::lambda)
        .def_readonly("retained", &LambdaFactor::retained)
        .def_property_readonly("tau", [](const LambdaFactor& f) { return f.cutoff.tau; })
        .def("basis", &LambdaFactor::basis)
        .def("lambda_op", &LambdaFactor::lambda_op);
    m.def(
        "factor_lambda", [](const OperatorMatrix& mf, double tau) { return factor_lambda(mf, SpectralCutoff{tau}); },
        py::arg("mf"), py::arg("tau") = 1e-6);
    m.def(
        "build_z",
        [](double t, const LambdaFactor& f, const BridgeConfig* cfg) {
            return cfg ? build_z(t, f, *cfg) : build_z(t, f);
        },
        py::arg("t"), py::arg("factor"), py::arg("bridge") = nullptr,
        "Z(t) by conjugation of the Hardy-space compression when a bridge is given, else Lambda U(t) Lambda^+.");
    m.def("intertwining_residual", &intertwining_residual, py::arg("t"), py::arg("factor"), py::arg("z"));

    py::class_<LineFunction>(m, "LineFunction")
        .def_property_readonly("grid", [](const LineFunction& f) { return std::const_pointer_cast<LineGrid>(f.grid); })
        .def_readonly("values", &LineFunction::values)
        .def("norm", &LineFunction::norm);
    py::class_<HardyFunction, LineFunction>(m, "HardyFunction")
        .def_readonly("hardy_defect", &HardyFunction::hardy_defect)
        .def("certified", &HardyFunction::certified);
    m.def(
        "line_function",
        [](std::shared_ptr<LineGrid> g, Eigen::VectorXcd v) {
            require(v.size() == g->n, "line_function: value count differs from the grid");
            return LineFunction{g, std::move(v)};
        },
        py::arg("grid"), py::arg("values"));
    m.def("hardy_defect", &hardy_defect, py::arg("f"));
    m.def("project_plus", &project_plus, py::arg("f"));
    m.def("project_minus", &project_minus, py::arg("f"));
    m.def("toeplitz_apply", &toeplitz_apply, py::arg("t"), py::arg("f"));
    m.def("toeplitz_adjoint_apply", &toeplitz_adjoint_apply, py::arg("t"), py::arg("g"));
    m.def(
        "kernel_witness",
        [](cd mu, double t0, std::shared_ptr<LineGrid> g) { return kernel_witness(mu, t0, g); }, py::arg("mu"),
        py::arg("t0"), py::arg("grid"));
    m.def("omega_f_apply", &omega_f_apply, py::arg("psi"), py::arg("bridge"));

    m.def(
        "oracle_mf_expectation",
        [](const EnergyState& psi, std::optional<std::vector<double>> eps) {
            const OracleReport r = oracle_mf_expectation(psi, eps ? *eps : default_epsilon_ladder(*psi.grid));
            return py::make_tuple(r.value, r.estimated_error);
        },
        py::arg("psi"), py::arg("epsilons") = py::none(), "Returns (value, estimated_error).");
    m.def("cauchy_expectation", &cauchy_expectation, py::arg("psi"));

    m.def("experiment_kinds", &kind_names);
    m.def(
        "run",
        [](const std::string& kind, const py::object& config) {
            const ExperimentConfig cfg = parse_config(from_python(config), parse_kind(kind));
            RunReport report;
            {
                py::gil_scoped_release release;
                report = run(cfg);
            }
            return to_python(report.to_json());
        },
        py::arg("kind"), py::arg("config") = py::dict(),
        "Runs an experiment from a configuration dict and returns the report as a dict.");
}
