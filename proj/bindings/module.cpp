// Python bindings for the main operations.  Thin pass-through: all numerics,
// validation, and error text live in the C++ library.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nucalc/expr.hpp>
#include <nucalc/harness.hpp>
#include <nucalc/mittag_leffler.hpp>
#include <nucalc/nu_calculus.hpp>
#include <nucalc/special_functions.hpp>
#include <nucalc/version.hpp>

namespace py = pybind11;
using namespace nucalc;

PYBIND11_MODULE(_nucalc, m) {
    m.doc() = "truncated fractional calculus on an extended Mittag-Leffler kernel";
    m.attr("__version__") = kLibraryVersion;

    // exception mapping: domain-style errors surface as ValueError,
    // convergence problems as ArithmeticError, the rest keep their own type
    py::register_exception<ParseError>(m, "ExpressionParseError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
    py::register_exception<UnsupportedRegime>(m, "UnsupportedRegimeError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "ReportIoError", PyExc_OSError);

    py::class_<MLParams>(m, "Params")
        .def(py::init<>())
        .def(py::init([](double alpha, double beta, double gamma, double c, double p) {
                 return MLParams{alpha, beta, gamma, c, p};
             }),
             py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 1.0,
             py::arg("c") = 2.0, py::arg("p") = 0.0)
        .def_readwrite("alpha", &MLParams::alpha)
        .def_readwrite("beta", &MLParams::beta)
        .def_readwrite("gamma", &MLParams::gamma)
        .def_readwrite("c", &MLParams::c)
        .def_readwrite("p", &MLParams::p)
        .def("__repr__", [](const MLParams& p) {
            return "Params(alpha=" + std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) +
                   ", gamma=" + std::to_string(p.gamma) + ", c=" + std::to_string(p.c) +
                   ", p=" + std::to_string(p.p) + ")";
        });

    // registered before any function that uses it as a default argument
    py::class_<QuadratureControl>(m, "QuadratureControl")
        .def(py::init<>())
        .def_readwrite("rel_tol", &QuadratureControl::rel_tol)
        .def_readwrite("max_levels", &QuadratureControl::max_levels);

    py::class_<QuadResult>(m, "QuadResult")
        .def_readonly("value", &QuadResult::value)
        .def_readonly("error_estimate", &QuadResult::error_estimate)
        .def_readonly("levels_used", &QuadResult::levels_used)
        .def("__float__", [](const QuadResult& r) { return r.value; });

    py::class_<SeriesResult>(m, "SeriesResult")
        .def_readonly("value", &SeriesResult::value)
        .def_readonly("terms_used", &SeriesResult::terms_used)
        .def_readonly("tail_estimate", &SeriesResult::tail_estimate)
        .def("__float__", [](const SeriesResult& r) { return r.value; })
        .def("__repr__", [](const SeriesResult& r) {
            return "SeriesResult(value=" + std::to_string(r.value) + ", terms_used=" +
                   std::to_string(r.terms_used) + ")";
        });

    py::class_<DerivResult>(m, "DerivResult")
        .def_readonly("value", &DerivResult::value)
        .def_readonly("per_eps", &DerivResult::per_eps)
        .def_readonly("observed_order", &DerivResult::observed_order)
        .def("__float__", [](const DerivResult& r) { return r.value; });

    py::class_<FnHandle>(m, "Expression")
        .def("__call__", [](const FnHandle& f, double t) { return eval(f, t); })
        .def("derivative", [](const FnHandle& f, double t) { return eval_d(f, t).derivative; })
        .def("__repr__", [](const FnHandle& f) { return "Expression(\"" + render(f) + "\")"; })
        .def("__str__", [](const FnHandle& f) { return render(f); });

    m.def("parse", &parse, py::arg("text"), "parse an expression in the variable t");
    m.def("substitute", &substitute, py::arg("outer"), py::arg("inner"),
          "compose: outer with t replaced by inner");

    m.def("gamma_fn", &gamma_fn, py::arg("x"));
    m.def("beta_fn", &beta_fn, py::arg("z"), py::arg("y"));
    m.def("extended_beta", &extended_beta, py::arg("z"), py::arg("y"), py::arg("p"),
          py::arg("ctl") = QuadratureControl{});
    m.def("nu_constant", &nu_constant, py::arg("params") = MLParams{},
          py::arg("ctl") = QuadratureControl{});

    m.def(
        "ml1", [](double alpha, double z) { return ml1(alpha, z); }, py::arg("alpha"),
        py::arg("z"));
    m.def(
        "ml3", [](double rho, double lambda, double delta, double z) {
            return ml3(rho, lambda, delta, z);
        },
        py::arg("rho"), py::arg("lambda_"), py::arg("delta"), py::arg("z"));
    m.def(
        "ml_extended",
        [](double theta, double vartheta, double nu, double c, double p, double z) {
            return ml_extended(theta, vartheta, nu, c, p, z);
        },
        py::arg("theta"), py::arg("vartheta"), py::arg("nu"), py::arg("c"), py::arg("p"),
        py::arg("z"));
    m.def(
        "ml_extended_gen",
        [](double mu, double delta, double vartheta, double q, double c, double p, double z) {
            return ml_extended_gen(mu, delta, vartheta, q, c, p, z);
        },
        py::arg("mu"), py::arg("delta"), py::arg("vartheta"), py::arg("q"), py::arg("c"),
        py::arg("p"), py::arg("z"));

    m.def(
        "deriv_chain",
        [](const FnHandle& f, double t, double mu, const MLParams& params) {
            return deriv_chain(f, t, mu, params);
        },
        py::arg("f"), py::arg("t"), py::arg("mu"), py::arg("params") = MLParams{});
    m.def(
        "deriv_limit",
        [](const FnHandle& f, double t, double mu, int i, const MLParams& params) {
            return deriv_limit(f, t, mu, i, params);
        },
        py::arg("f"), py::arg("t"), py::arg("mu"), py::arg("i") = 1,
        py::arg("params") = MLParams{});
    m.def(
        "deriv_n",
        [](const FnHandle& f, double t, double mu, int n, const MLParams& params) {
            return deriv_n(f, t, mu, n, params);
        },
        py::arg("f"), py::arg("t"), py::arg("mu"), py::arg("n"),
        py::arg("params") = MLParams{});
    m.def(
        "integral",
        [](const FnHandle& f, double a, double t, double mu, const MLParams& params) {
            return integral(f, a, t, mu, params);
        },
        py::arg("f"), py::arg("a"), py::arg("t"), py::arg("mu"),
        py::arg("params") = MLParams{});
    m.def(
        "integral_full",
        [](const FnHandle& f, double a, double t, double mu, const MLParams& params) {
            return integral_full(f, a, t, mu, params);
        },
        py::arg("f"), py::arg("a"), py::arg("t"), py::arg("mu"),
        py::arg("params") = MLParams{});
    m.def(
        "deriv_ml2_n",
        [](double lambda, double delta, double t, double mu, int n, const MLParams& params) {
            return deriv_ml2_n(lambda, delta, t, mu, n, params);
        },
        py::arg("lambda_"), py::arg("delta"), py::arg("t"), py::arg("mu"), py::arg("n"),
        py::arg("params") = MLParams{});
    m.def(
        "compose_deriv",
        [](const FnHandle& f, double t, double mu, double eta, const MLParams& params) {
            return compose_deriv(f, t, mu, eta, params);
        },
        py::arg("f"), py::arg("t"), py::arg("mu"), py::arg("eta"),
        py::arg("params") = MLParams{});

    py::enum_<ClosedFormKind>(m, "ClosedFormKind")
        .value("exp_at", ClosedFormKind::exp_at)
        .value("sin_at", ClosedFormKind::sin_at)
        .value("cos_at", ClosedFormKind::cos_at)
        .value("power_a", ClosedFormKind::power_a)
        .value("power_mu_over_mu", ClosedFormKind::power_mu_over_mu)
        .value("eigen_exp", ClosedFormKind::eigen_exp)
        .value("eigen_sin", ClosedFormKind::eigen_sin)
        .value("eigen_cos", ClosedFormKind::eigen_cos);
    m.def(
        "closed_form_deriv",
        [](ClosedFormKind kind, double a, double t, double mu, const MLParams& params) {
            return closed_form_deriv(kind, a, t, mu, params);
        },
        py::arg("kind"), py::arg("a"), py::arg("t"), py::arg("mu"),
        py::arg("params") = MLParams{});
    m.def("closed_form_expression", &closed_form_expression, py::arg("kind"), py::arg("a"),
          py::arg("mu"));

    m.def(
        "deriv_ml2",
        [](double lambda, double delta, double t, double mu, const MLParams& params) {
            return deriv_ml2(lambda, delta, t, mu, params);
        },
        py::arg("lambda_"), py::arg("delta"), py::arg("t"), py::arg("mu"),
        py::arg("params") = MLParams{});
    m.def(
        "integral_ml2",
        [](double lambda, double delta, double a, double t, double mu, const MLParams& params) {
            return integral_ml2(lambda, delta, a, t, mu, params);
        },
        py::arg("lambda_"), py::arg("delta"), py::arg("a"), py::arg("t"), py::arg("mu"),
        py::arg("params") = MLParams{});
    m.def(
        "integral_power_kernel",
        [](double lambda, double t, double mu, const MLParams& params) {
            return integral_power_kernel(lambda, t, mu, params);
        },
        py::arg("lambda_"), py::arg("t"), py::arg("mu"), py::arg("params") = MLParams{});

    py::class_<CheckCase>(m, "CheckCase")
        .def_readonly("theorem_id", &CheckCase::theorem_id)
        .def_readonly("seed", &CheckCase::seed)
        .def_readonly("case_index", &CheckCase::case_index)
        .def_readonly("inputs", &CheckCase::inputs)
        .def_readonly("residual", &CheckCase::residual)
        .def_readonly("tolerance", &CheckCase::tolerance)
        .def_readonly("passed", &CheckCase::passed);

    py::class_<CheckReport>(m, "CheckReport")
        .def_readonly("cases", &CheckReport::cases)
        .def_readonly("seed", &CheckReport::seed)
        .def_readonly("n_passed", &CheckReport::n_passed)
        .def_readonly("n_failed", &CheckReport::n_failed)
        .def("all_passed", &CheckReport::all_passed);

    m.def("run_suite", &run_suite, py::arg("seed"), py::arg("n_cases"), py::arg("out_path"),
          "run every identity check family and write the JSON report",
          py::call_guard<py::gil_scoped_release>());
}
