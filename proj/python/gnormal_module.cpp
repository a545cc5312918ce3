#include "gnormal/charfun.hpp"
#include "gnormal/cli.hpp"
#include "gnormal/error.hpp"
#include "gnormal/expectation.hpp"
#include "gnormal/model.hpp"
#include "gnormal/solver.hpp"
#include "gnormal/theorems.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

namespace py = pybind11;
using namespace gnormal;

namespace {

py::dict row_dict(const SweepRow& r) {
    py::dict d;
    d["t"] = r.t;
    d["x"] = r.x;
    d["quantity"] = r.quantity;
    d["measured"] = r.measured;
    d["reference"] = r.reference;
    d["error_estimate"] = r.error_estimate;
    d["bound"] = r.bound ? py::cast(*r.bound) : py::none();
    return d;
}

py::dict result_dict(const ExpectationResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["error_estimate"] = r.error_estimate;
    d["resolution_used"] = r.resolution_used;
    return d;
}

ExpectConfig expect_config(int n, double cfl, bool error_estimate) {
    ExpectConfig cfg{n, cfl, error_estimate};
    cfg.validate();
    return cfg;
}

TheoremConfig theorem_config(int n) {
    TheoremConfig cfg;
    cfg.expect.n = n;
    cfg.expect.validate();
    return cfg;
}

Schedule to_schedule(const py::object& s) {
    if (py::isinstance<py::str>(s))
        return parse_schedule(s.cast<std::string>());
    std::vector<Segment> segs;
    for (const auto& item : s) {
        const auto t = item.cast<std::tuple<double, double, double>>();
        segs.push_back({GFunction(std::get<0>(t), std::get<1>(t)), std::get<2>(t)});
    }
    return Schedule(std::move(segs));
}

}  // namespace

PYBIND11_MODULE(_gnormal, m) {
    m.doc() = "Numerics for one-dimensional G-normal distributions";

    static py::exception<Error> base_error(m, "GNormalError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
            case ErrorKind::io:
                PyErr_SetString(PyExc_OSError, e.what());
                break;
            case ErrorKind::instability:
            case ErrorKind::cfl:
                PyErr_SetString(PyExc_ArithmeticError, e.what());
                break;
            default:
                PyErr_SetString(PyExc_ValueError, e.what());
            }
        }
    });

    py::class_<GFunction>(m, "GFunction")
        .def(py::init<double, double>(), py::arg("sigma_lo"), py::arg("sigma_hi"))
        .def(py::init([](std::pair<double, double> b) { return GFunction(b.first, b.second); }))
        .def_static("from_beta_sigma", &GFunction::from_beta_sigma, py::arg("beta"), py::arg("sigma"))
        .def_property_readonly("sigma_lo", &GFunction::sigma_lo)
        .def_property_readonly("sigma_hi", &GFunction::sigma_hi)
        .def_property_readonly("beta", [](const GFunction& g) { return beta_of(g); })
        .def_property_readonly("sigma", [](const GFunction& g) { return sigma_of(g); })
        .def("non_degenerate", &GFunction::non_degenerate)
        .def("__call__", [](const GFunction& g, double a) { return g_eval(g, a); })
        .def(py::self == py::self)
        .def("__repr__", [](const GFunction& g) {
            std::ostringstream s;
            s.precision(17);
            s << "GFunction(" << g.sigma_lo() << ", " << g.sigma_hi() << ")";
            return s.str();
        });
    py::implicitly_convertible<py::tuple, GFunction>();

    py::class_<TestFunctionSpec>(m, "TestFunction")
        .def(py::init([](const std::string& text) { return cli::parse_test_function(text); }), py::arg("spec"))
        .def_static(
            "custom",
            [](std::function<double(double)> fn, double bound, double lipschitz, std::optional<double> period) {
                return TestFunctionSpec(CustomFn{std::move(fn), bound, lipschitz, period, "custom"});
            },
            py::arg("fn"), py::arg("bound"), py::arg("lipschitz"), py::arg("period") = py::none())
        .def("__call__", &TestFunctionSpec::operator())
        .def("bound", &TestFunctionSpec::bound)
        .def("lipschitz", &TestFunctionSpec::lipschitz)
        .def("period", &TestFunctionSpec::period)
        .def("affine", &TestFunctionSpec::affine, py::arg("scale"), py::arg("offset"))
        .def("__repr__", [](const TestFunctionSpec& f) { return "TestFunction(" + f.describe() + ")"; });
    py::implicitly_convertible<py::str, TestFunctionSpec>();

    m.def("beta_of", &beta_of);
    m.def("sigma_of", &sigma_of);
    m.def("candidate_normal", &candidate_normal);

    m.def("phi", py::vectorize(&phi_eval), py::arg("beta"), py::arg("x"));
    m.def("phi_d1", py::vectorize(&phi_d1), py::arg("beta"), py::arg("x"));
    m.def("phi_d2", py::vectorize(&phi_d2), py::arg("beta"), py::arg("x"));
    m.def("separation_gap", &separation_gap, py::arg("alpha"), py::arg("beta"));
    m.def("eigen_residual", &eigen_residual, py::arg("g"), py::arg("beta"), py::arg("n_samples") = 10000);

    m.def(
        "solve",
        [](const py::object& schedule, py::array_t<double, py::array::c_style | py::array::forcecast> values,
           double x_min, double x_max, const std::string& boundary, double cfl, bool error_estimate) {
            Boundary b;
            if (boundary == "periodic")
                b = Boundary::periodic;
            else if (boundary == "edge_copy")
                b = Boundary::edge_copy;
            else
                throw py::value_error("boundary must be 'periodic' or 'edge_copy'");
            const auto v = values.unchecked<1>();
            std::vector<double> data(v.data(0), v.data(0) + v.shape(0));
            const Grid grid(x_min, x_max, static_cast<int>(data.size()), b);
            const Schedule s = to_schedule(schedule);
            SolveConfig cfg{cfl, error_estimate};
            const SolveReport r = [&] {
                py::gil_scoped_release release;
                return solve(s, Field(grid, std::move(data)), cfg);
            }();
            py::array_t<double> x(grid.size());
            py::array_t<double> u(grid.size());
            for (int i = 0; i < grid.size(); ++i) {
                x.mutable_at(i) = grid.node(i);
                u.mutable_at(i) = r.final[i];
            }
            py::dict d;
            d["x"] = x;
            d["u"] = u;
            d["steps_taken"] = r.steps_taken;
            d["dt_used"] = r.dt_used;
            d["error_estimate"] = r.error_estimate ? py::cast(*r.error_estimate) : py::none();
            return d;
        },
        py::arg("schedule"), py::arg("values"), py::arg("x_min"), py::arg("x_max"),
        py::arg("boundary") = "periodic", py::arg("cfl") = 0.5, py::arg("error_estimate") = false,
        "Solve the G-heat equation from node values on [x_min, x_max). The schedule is "
        "'lo:hi:dur,...' or a list of (lo, hi, dur) tuples.");

    m.def(
        "expect",
        [](const GFunction& g, const TestFunctionSpec& f, double t, double x, int n, double cfl, bool err) {
            return result_dict(expect_scaled(g, f, t, x, expect_config(n, cfl, err)));
        },
        py::arg("g"), py::arg("f"), py::arg("t") = 1.0, py::arg("x") = 0.0, py::arg("n") = 2048,
        py::arg("cfl") = 0.5, py::arg("error_estimate") = true, "N_G[f(x + sqrt(t) .)]");

    m.def(
        "convolve",
        [](const std::vector<GFunction>& gs, const TestFunctionSpec& f, double t, double x, int n, double cfl,
           bool err) { return result_dict(convolve_expect_scaled(gs, f, t, x, expect_config(n, cfl, err))); },
        py::arg("gs"), py::arg("f"), py::arg("t") = 1.0, py::arg("x") = 0.0, py::arg("n") = 2048,
        py::arg("cfl") = 0.5, py::arg("error_estimate") = true,
        "(N_{G1} * ... * N_{Gk})[f(x + sqrt(t) .)], the last factor acting first");

    m.def("classical_expect", &classical_expect, py::arg("sigma"), py::arg("f"));

    py::class_<TheoremReport>(m, "TheoremReport")
        .def_readonly("name", &TheoremReport::name)
        .def_property_readonly("verdict", [](const TheoremReport& r) { return std::string(to_string(r.verdict)); })
        .def_property_readonly("exit_code", [](const TheoremReport& r) { return exit_code(r.verdict); })
        .def_readonly("margin", &TheoremReport::margin)
        .def_readonly("summary", &TheoremReport::summary)
        .def_property_readonly("tolerances",
                               [](const TheoremReport& r) {
                                   py::dict d;
                                   for (const auto& [k, v] : r.tolerances)
                                       d[py::str(k)] = v;
                                   return d;
                               })
        .def_property_readonly("sweep",
                               [](const TheoremReport& r) {
                                   py::list rows;
                                   for (const auto& row : r.sweep)
                                       rows.append(row_dict(row));
                                   return rows;
                               })
        .def("to_csv",
             [](const TheoremReport& r) {
                 std::ostringstream s;
                 write_report_csv(r, s);
                 return s.str();
             })
        .def("__repr__", [](const TheoremReport& r) { return verdict_line(r); });

    const std::vector<double> sweep(std::begin(kDefaultSweep), std::end(kDefaultSweep));
    m.def(
        "verify_theorem1",
        [](const GFunction& g1, const GFunction& g2, const std::vector<double>& ts, int n) {
            py::gil_scoped_release release;
            return verify_theorem1(g1, g2, ts, theorem_config(n));
        },
        py::arg("g1"), py::arg("g2"), py::arg("t") = sweep, py::arg("n") = 1024);
    m.def(
        "verify_theorem2",
        [](const GFunction& g1, const GFunction& g2, const std::vector<double>& ts, int n) {
            py::gil_scoped_release release;
            return verify_theorem2(g1, g2, ts, theorem_config(n));
        },
        py::arg("g1"), py::arg("g2"), py::arg("t") = sweep, py::arg("n") = 1024);
    m.def(
        "check_eigen_decay",
        [](const GFunction& g, const std::vector<double>& ts, const std::vector<double>& probes, int n,
           double tolerance) {
            auto cfg = theorem_config(n);
            cfg.eigen_tolerance = tolerance;
            py::gil_scoped_release release;
            return check_eigen_decay(g, ts, probes, cfg);
        },
        py::arg("g"), py::arg("t") = std::vector<double>{0.25, 1.0, 4.0},
        py::arg("probes") = std::vector<double>{0.0, std::numbers::pi / 3.0, std::numbers::pi}, py::arg("n") = 1024,
        py::arg("tolerance") = 1e-3);
    m.def("check_separation", &check_separation, py::arg("alpha"), py::arg("beta"), py::arg("n_grid") = 100000);
}
