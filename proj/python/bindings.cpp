#include "slackal/acquisition.hpp"
#include "slackal/augmented_lagrangian.hpp"
#include "slackal/driver.hpp"
#include "slackal/errors.hpp"
#include "slackal/lhs.hpp"
#include "slackal/problems.hpp"
#include "slackal/trace_io.hpp"
#include "slackal/wncs.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace slackal;

namespace {

ConstraintKinds kinds_of(int m, int p) { return ConstraintKinds(m, p); }

ALState make_state(const Vector& lambda, double rho, double epsilon, int iteration) {
    ALState s;
    s.lambda = lambda;
    s.rho = rho;
    s.epsilon = epsilon;
    s.iteration = iteration;
    s.validate();
    return s;
}

Moments make_moments(double f_mean, double f_sd, bool f_known, const Vector& c_mean, const Vector& c_sd) {
    return Moments{f_mean, f_sd, f_known, c_mean, c_sd};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Slack-variable augmented Lagrangian Bayesian optimization";

    // Translators run newest first, so the base class is registered first.
    auto base = py::register_exception<Error>(m, "SlackalError", PyExc_RuntimeError);
    py::register_exception<FitError>(m, "FitError", base);
    py::register_exception<DuplicateInputError>(m, "DuplicateInputError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<ShapeError>(m, "ShapeError", base);
    py::register_exception<StateError>(m, "StateError", base);
    py::register_exception<InfeasibleGridError>(m, "InfeasibleGridError", base);
    py::register_exception<IOError>(m, "IOError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<AccuracyError>(m, "AccuracyError", base);

    // wncs
    py::enum_<QuadratureMethod>(m, "QuadratureMethod")
        .value("Direct", QuadratureMethod::Direct)
        .value("Trapezoid", QuadratureMethod::Trapezoid);

    py::class_<QuadratureConfig>(m, "QuadratureConfig")
        .def(py::init<>())
        .def_readwrite("node_count", &QuadratureConfig::node_count)
        .def_readwrite("inversion_tolerance", &QuadratureConfig::inversion_tolerance)
        .def_readwrite("max_inversion_terms", &QuadratureConfig::max_inversion_terms)
        .def_readwrite("method", &QuadratureConfig::method)
        .def_readwrite("refine_tolerance", &QuadratureConfig::refine_tolerance)
        .def_readwrite("max_refinements", &QuadratureConfig::max_refinements);

    py::class_<WNCSSpec>(m, "WNCSSpec")
        .def(py::init<Vector, Vector, double, double>(), py::arg("weights"), py::arg("noncentralities"),
             py::arg("gaussian_mean") = 0.0, py::arg("gaussian_sd") = 0.0)
        .def_readonly("weights", &WNCSSpec::weights)
        .def_readonly("noncentralities", &WNCSSpec::noncentralities)
        .def_readonly("gaussian_mean", &WNCSSpec::gaussian_mean)
        .def_readonly("gaussian_sd", &WNCSSpec::gaussian_sd)
        .def("mean", &WNCSSpec::mean)
        .def("variance", &WNCSSpec::variance);

    m.def("cdf", &cdf, py::arg("spec"), py::arg("t"), py::arg("quad") = QuadratureConfig{});
    m.def("ramp_expectation", &ramp_expectation, py::arg("spec"), py::arg("t"), py::arg("quad") = QuadratureConfig{});
    m.def("sample", &sample, py::arg("spec"), py::arg("count"), py::arg("seed"));
    m.def("ei_known_objective", &ei_known_objective, py::arg("spec"), py::arg("w_min"), py::arg("rho"),
          py::arg("quad") = QuadratureConfig{});
    m.def("ei_unknown_objective", &ei_unknown_objective, py::arg("spec"), py::arg("w_tilde"), py::arg("rho"),
          py::arg("quad") = QuadratureConfig{});

    // augmented Lagrangian
    py::class_<ConstraintKinds>(m, "ConstraintKinds")
        .def(py::init(&kinds_of), py::arg("inequalities"), py::arg("equalities"))
        .def_property_readonly("m", &ConstraintKinds::m)
        .def_property_readonly("p", &ConstraintKinds::p);

    py::class_<ALState>(m, "ALState")
        .def(py::init(&make_state), py::arg("lambda_"), py::arg("rho"), py::arg("epsilon") = 1e-2,
             py::arg("iteration") = 0)
        .def_readwrite("lambda_", &ALState::lambda)
        .def_readwrite("rho", &ALState::rho)
        .def_readwrite("epsilon", &ALState::epsilon)
        .def_readwrite("iteration", &ALState::iteration);

    m.def("slack_al_value", &slack_al_value, py::arg("f"), py::arg("c"), py::arg("s"), py::arg("state"));
    m.def("original_al_value", &original_al_value, py::arg("f"), py::arg("g"), py::arg("h"), py::arg("state"));
    m.def("optimal_slack", &optimal_slack, py::arg("c"), py::arg("state"), py::arg("kinds"));
    m.def("update_multipliers", &update_multipliers, py::arg("state"), py::arg("c"), py::arg("s"));
    m.def("update_penalty", &update_penalty, py::arg("state"), py::arg("c"), py::arg("kinds"));
    m.def("is_valid", &is_valid, py::arg("c"), py::arg("kinds"), py::arg("epsilon"));

    // acquisition
    py::class_<Moments>(m, "Moments")
        .def(py::init(&make_moments), py::arg("f_mean"), py::arg("f_sd"), py::arg("f_known"), py::arg("c_mean"),
             py::arg("c_sd"))
        .def_readwrite("f_mean", &Moments::f_mean)
        .def_readwrite("f_sd", &Moments::f_sd)
        .def_readwrite("f_known", &Moments::f_known)
        .def_readwrite("c_mean", &Moments::c_mean)
        .def_readwrite("c_sd", &Moments::c_sd);

    m.def("ei_gaussian", &ei_gaussian, py::arg("mu"), py::arg("sigma"), py::arg("f_min"));
    m.def("slack_al_ei",
          py::overload_cast<const Moments&, const ALState&, const ConstraintKinds&, double, const QuadratureConfig&>(
              &slack_al_ei),
          py::arg("moments"), py::arg("state"), py::arg("kinds"), py::arg("y_min"),
          py::arg("quad") = QuadratureConfig{});
    m.def("slack_al_ei_at", &slack_al_ei_at, py::arg("moments"), py::arg("s"), py::arg("state"), py::arg("y_min"),
          py::arg("quad") = QuadratureConfig{});
    m.def("efi", py::overload_cast<const Moments&, const ConstraintKinds&, double, double>(&efi),
          py::arg("moments"), py::arg("kinds"), py::arg("epsilon"), py::arg("f_min"));

    // problems
    m.def("latin_hypercube", py::overload_cast<int, int, std::uint64_t>(&latin_hypercube), py::arg("n"),
          py::arg("d"), py::arg("seed"));
    m.def("problem_names", &problem_names);
    m.def(
        "evaluate",
        [](const std::string& name, const Vector& x, const std::string& gsbp_variant) {
            ProblemOptions opts;
            opts.gsbp_variant = gsbp_variant;
            const Evaluation e = evaluate(make_problem(name, opts), x);
            return py::make_tuple(e.f, e.c);
        },
        py::arg("problem"), py::arg("x"), py::arg("gsbp_variant") = "prose");
    m.def(
        "reference_optimum",
        [](const std::string& name, int grid, double epsilon) {
            const ReferenceOptimum r = reference_optimum(make_problem(name), grid, epsilon);
            py::dict d;
            d["x"] = r.x;
            d["f"] = r.f;
            d["epsilon"] = r.epsilon;
            d["tag"] = r.tag;
            return d;
        },
        py::arg("problem"), py::arg("grid") = 0, py::arg("epsilon") = 1e-2);
    m.def("f1", &functions::f1);
    m.def("f2", &functions::f2);
    m.def("c1", &functions::c1);
    m.def("c2", &functions::c2);
    m.def("c3", &functions::c3);
    m.def("c4", &functions::c4);
    m.def("c5", &functions::c5);
    m.def("c6", &functions::c6);

    // driver: returns the trace as its JSON text; the Python package decodes it
    m.def(
        "run_json",
        [](const std::string& problem, const std::string& method, int budget, int n0, std::uint64_t seed,
           double epsilon, int candidate_count) {
            RunConfig rc;
            rc.problem = problem;
            rc.method = parse_method(method);
            rc.budget = budget;
            rc.n0 = n0;
            rc.seed = seed;
            rc.epsilon = epsilon;
            rc.proposal.candidate_count = candidate_count;
            Trace t;
            {
                py::gil_scoped_release release;
                t = run(rc);
            }
            return trace_to_json(t);
        },
        py::arg("problem"), py::arg("method") = "slack-al-ei-optim", py::arg("budget") = 40, py::arg("n0") = 10,
        py::arg("seed") = 0, py::arg("epsilon") = 1e-2, py::arg("candidate_count") = 1000);
}
