/// Python bindings for the ppimex library.

#include "ppimex/config.hpp"
#include "ppimex/experiments.hpp"
#include "ppimex/integrators.hpp"
#include "ppimex/invariant_analysis.hpp"
#include "ppimex/montecarlo.hpp"
#include "ppimex/order_conditions.hpp"
#include "ppimex/stability.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace ppimex;

namespace {

py::dict residuals_dict(const ConditionResiduals& r) {
    py::dict d;
    d["r1"] = r.r1;
    d["r2"] = r.r2;
    d["r3"] = r.r3;
    d["r4"] = r.r4;
    d["commutator_required"] = r.commutator_required;
    d["max_abs"] = r.max_abs();
    d["satisfied"] = r.satisfied(1e-14);
    return d;
}

py::dict estimate_dict(const McEstimate& e) {
    py::dict d;
    d["mean"] = e.mean;
    d["std_error"] = e.std_error;
    d["n"] = e.n;
    d["seed"] = e.seed;
    return d;
}

Nonlinearity nonlinearity_from(const std::string& text) { return Nonlinearity::parse(text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Postprocessed IMEX integrators for invariant-measure sampling";
    m.def("version", [] { return std::string(version()); });

    py::enum_<Method>(m, "Method")
        .value("euler", Method::euler)
        .value("trapezoidal", Method::trapezoidal)
        .value("new_method", Method::new_method);
    py::enum_<Scheme>(m, "Scheme")
        .value("linearized_euler", Scheme::linearized_euler)
        .value("trapezoidal", Scheme::trapezoidal)
        .value("postprocessed", Scheme::postprocessed);
    py::enum_<Chain>(m, "Chain")
        .value("exact", Chain::exact)
        .value("euler", Chain::euler)
        .value("trapezoidal", Chain::trapezoidal)
        .value("new_primary", Chain::new_primary)
        .value("new_postprocessed", Chain::new_postprocessed);

    // Stability functions.
    m.def("moment_ratio", &moment_ratio, py::arg("method"), py::arg("z"), py::arg("beta") = 0.0,
          "R(z, beta); None where the chain is unstable");
    m.def("postprocessed_moment_ratio", &postprocessed_moment_ratio, py::arg("method"),
          py::arg("z"), py::arg("beta") = 0.0);
    m.def("postprocessed_moment_ratio_closed_form", &postprocessed_moment_ratio_closed_form,
          py::arg("z"), py::arg("beta"));
    m.def("postprocessed_error_bound", &postprocessed_error_bound, py::arg("z"), py::arg("beta"));
    m.def(
        "check_postprocessed_error_bound",
        [](const std::vector<double>& z, const std::vector<double>& beta) {
            const auto r = check_postprocessed_error_bound(z, beta);
            py::dict d;
            d["max_ratio"] = r.max_ratio;
            d["argmax"] = py::make_tuple(r.argmax_z, r.argmax_beta);
            d["evaluated"] = r.evaluated;
            d["skipped"] = r.skipped;
            d["holds"] = r.holds();
            return d;
        },
        py::arg("z_grid"), py::arg("beta_grid"));
    m.def(
        "l_stability_verdict",
        [](Method method) { return std::string(stability_class_name(l_stability_verdict(method))); },
        py::arg("method"));

    // Order conditions.
    py::class_<SchemeCoefficients>(m, "SchemeCoefficients")
        .def(py::init([](double a1, double a2, double a3, double b1, double b2, double c) {
                 return SchemeCoefficients{a1, a2, a3, b1, b2, c};
             }),
             py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("b1"), py::arg("b2"),
             py::arg("c"))
        .def_static("canonical", &SchemeCoefficients::canonical)
        .def_readwrite("a1", &SchemeCoefficients::a1)
        .def_readwrite("a2", &SchemeCoefficients::a2)
        .def_readwrite("a3", &SchemeCoefficients::a3)
        .def_readwrite("b1", &SchemeCoefficients::b1)
        .def_readwrite("b2", &SchemeCoefficients::b2)
        .def_readwrite("c", &SchemeCoefficients::c)
        .def("__repr__", [](const SchemeCoefficients& s) {
            std::ostringstream os;
            os << "SchemeCoefficients(a1=" << s.a1 << ", a2=" << s.a2 << ", a3=" << s.a3
               << ", b1=" << s.b1 << ", b2=" << s.b2 << ", c=" << s.c << ")";
            return os.str();
        });
    m.def("check_conditions",
          [](const SchemeCoefficients& s) { return residuals_dict(check_conditions(s)); },
          py::arg("coefficients"));
    m.def("solve_family", &solve_family, py::arg("b1"), py::arg("b2"));

    // Problems.
    py::class_<SemilinearSystem>(m, "SemilinearSystem")
        .def_static(
            "diagonal",
            [](std::vector<double> lambda, std::vector<double> noise_scale,
               const std::string& nonlinearity, double sigma) {
                return SemilinearSystem::diagonal(std::move(lambda), std::move(noise_scale),
                                                  nonlinearity_from(nonlinearity), sigma);
            },
            py::arg("eigenvalues"), py::arg("noise_scale"), py::arg("nonlinearity") = "none",
            py::arg("sigma") = 1.0)
        .def_static(
            "dirichlet_grid",
            [](std::size_t n, const std::string& nonlinearity, double sigma) {
                return SemilinearSystem::dirichlet_grid(n, nonlinearity_from(nonlinearity), sigma);
            },
            py::arg("n_points"), py::arg("nonlinearity") = "none", py::arg("sigma") = 1.0)
        .def_property_readonly("dim", &SemilinearSystem::dim)
        .def_property_readonly("dx", &SemilinearSystem::dx)
        .def_property_readonly("sigma", &SemilinearSystem::sigma)
        .def_property_readonly("eigenvalues",
                               [](const SemilinearSystem& s) {
                                   return std::vector<double>(s.lambda().begin(), s.lambda().end());
                               })
        .def("squared_norm", [](const SemilinearSystem& s, const std::vector<double>& u) {
            return s.squared_norm(u);
        });

    py::class_<SpectralProblem>(m, "SpectralProblem")
        .def(py::init([](std::vector<double> lambda, std::vector<double> q,
                         std::optional<std::vector<double>> b, double sigma,
                         std::optional<std::string> nonlinearity) {
                 SpectralProblem p;
                 p.lambda = std::move(lambda);
                 p.q = std::move(q);
                 p.b = std::move(b);
                 p.sigma = sigma;
                 if (nonlinearity) p.nonlinearity = nonlinearity_from(*nonlinearity);
                 p.validate();
                 return p;
             }),
             py::arg("eigenvalues"), py::arg("q"), py::arg("b") = py::none(),
             py::arg("sigma") = 1.0, py::arg("nonlinearity") = py::none())
        .def_static("white_noise_heat", &SpectralProblem::white_noise_heat, py::arg("n_modes"),
                    py::arg("sigma") = 1.0)
        .def_readonly("eigenvalues", &SpectralProblem::lambda)
        .def_readonly("q", &SpectralProblem::q)
        .def_readonly("b", &SpectralProblem::b)
        .def_readonly("sigma", &SpectralProblem::sigma)
        .def_property_readonly("n_modes", &SpectralProblem::n_modes)
        .def("system", &SpectralProblem::system)
        .def("with_linear_decay", [](SpectralProblem p, std::vector<double> b) {
            p.b = std::move(b);
            p.validate();
            return p;
        });

    // Integrators.
    py::class_<Stepper>(m, "Stepper")
        .def(py::init<SemilinearSystem, double>(), py::arg("system"), py::arg("h"))
        .def_property_readonly("h", &Stepper::h)
        .def_property_readonly("dim", &Stepper::dim)
        .def(
            "step",
            [](const Stepper& s, Scheme scheme, const std::vector<double>& u,
               const std::vector<double>& xi) {
                std::vector<double> out(s.dim());
                StepWorkspace ws(s.dim());
                s.step(scheme, u, xi, out, ws);
                return out;
            },
            py::arg("scheme"), py::arg("u"), py::arg("xi"))
        .def(
            "postprocess",
            [](const Stepper& s, const std::vector<double>& u, const std::vector<double>& xi) {
                std::vector<double> out(s.dim());
                StepWorkspace ws(s.dim());
                s.postprocess(u, xi, out, ws);
                return out;
            },
            py::arg("u"), py::arg("xi"));
    m.def(
        "step_new_spde",
        [](const SemilinearSystem& system, double h, const std::vector<double>& u,
           const std::vector<double>& xi) { return step_new_spde(system, h, u, xi); },
        py::arg("system"), py::arg("h"), py::arg("u"), py::arg("xi"),
        "Returns (u_next, u_bar) for one step of the postprocessed scheme");
    m.def(
        "run_trajectory",
        [](const SemilinearSystem& system, Scheme scheme, double h, std::uint64_t n_steps,
           std::uint64_t seed, const std::vector<double>& u0) {
            const auto r = run_trajectory(system, scheme, h, n_steps, seed, u0);
            return py::make_tuple(r.u, r.u_bar);
        },
        py::arg("system"), py::arg("scheme"), py::arg("h"), py::arg("n_steps"),
        py::arg("seed"), py::arg("u0"));

    // Invariant-measure analysis.
    m.def("exact_invariant",
          [](const SpectralProblem& p) { return exact_invariant(p).variances; },
          py::arg("problem"));
    m.def(
        "chain_invariant",
        [](const SpectralProblem& p, Chain chain, double h) {
            return chain_invariant(p, chain, h).variances;
        },
        py::arg("problem"), py::arg("chain"), py::arg("h"));
    m.def(
        "trace_distance",
        [](std::vector<double> a, std::vector<double> b) {
            return trace_distance({std::move(a)}, {std::move(b)});
        },
        py::arg("variances1"), py::arg("variances2"));
    m.def(
        "convergence_order_study",
        [](const SpectralProblem& p, Method method, const std::vector<double>& h_grid,
           double tail_tolerance) {
            const auto s = convergence_order_study(p, method, h_grid, tail_tolerance);
            py::dict d;
            d["h"] = s.h;
            d["distance"] = s.distance;
            d["tail_ratio"] = s.tail_ratio;
            d["exact"] = s.exact;
            d["slope"] = s.fit ? py::cast(s.fit->slope) : py::none();
            d["slope_stderr"] = s.fit ? py::cast(s.fit->slope_stderr) : py::none();
            return d;
        },
        py::arg("problem"), py::arg("method"), py::arg("h_grid"),
        py::arg("tail_tolerance") = 0.01);
    m.def(
        "regularity_profile",
        [](const SpectralProblem& p, Chain chain, double h, const std::vector<double>& s_grid,
           double ratio) {
            const auto r = regularity_profile(p, chain, h, s_grid, ratio);
            py::dict d;
            d["s"] = r.s_values;
            d["moments"] = r.moments;
            d["half_moments"] = r.half_moments;
            d["convergent"] = r.convergent;
            d["reg_estimate"] = r.reg_estimate;
            return d;
        },
        py::arg("problem"), py::arg("chain"), py::arg("h"), py::arg("s_grid"),
        py::arg("divergence_ratio") = 1.05);

    // Monte Carlo.
    m.def(
        "coupled_compare",
        [](const SemilinearSystem& system, const std::vector<Scheme>& schemes,
           std::uint64_t n_samples, std::vector<double> h_grid, double T, std::uint64_t seed,
           const std::string& functional, double h_ref, unsigned workers) {
            McConfig cfg;
            cfg.n_samples = n_samples;
            cfg.h_grid = std::move(h_grid);
            cfg.T = T;
            cfg.seed = seed;
            cfg.functional = parse_functional(functional);
            cfg.h_ref = h_ref;
            cfg.workers = workers;
            CoupledResult r;
            {
                py::gil_scoped_release release;
                r = coupled_compare(system, schemes, cfg);
            }
            py::dict d;
            d["T"] = r.T;
            d["base_step"] = r.base_step;
            d["reference"] = estimate_dict(r.reference);
            d["failures"] = r.failures;
            py::list entries;
            for (const auto& e : r.entries) {
                py::dict x;
                x["scheme"] = e.scheme;
                x["h"] = e.h;
                x["steps"] = e.steps;
                x["estimate"] = estimate_dict(e.estimate);
                x["error"] = estimate_dict(e.error);
                entries.append(x);
            }
            d["entries"] = entries;
            return d;
        },
        py::arg("system"), py::arg("schemes"), py::arg("n_samples"), py::arg("h_grid"),
        py::arg("T") = 1.0, py::arg("seed") = 1, py::arg("functional") = "exp_neg_sq_norm",
        py::arg("h_ref") = 0.0, py::arg("workers") = 0);
    m.def(
        "global_order_fit",
        [](const std::vector<double>& h, const std::vector<double>& error,
           const std::vector<double>& std_error) {
            if (h.size() != error.size() || h.size() != std_error.size())
                throw std::invalid_argument("h, error and std_error must have equal length");
            std::vector<ErrorPoint> pts;
            for (std::size_t i = 0; i < h.size(); ++i) pts.push_back({h[i], error[i], std_error[i]});
            const auto f = global_order_fit(pts);
            py::dict d;
            d["slope"] = f.slope;
            d["slope_stderr"] = f.slope_stderr;
            d["intercept"] = f.intercept;
            d["used"] = f.used.size();
            d["excluded"] = f.excluded.size();
            return d;
        },
        py::arg("h"), py::arg("error"), py::arg("std_error"));
    m.def(
        "time_average",
        [](const SemilinearSystem& system, Scheme scheme, double h, std::uint64_t n_steps,
           std::uint64_t burn_in, std::uint64_t seed, const std::string& functional) {
            McEstimate e;
            {
                py::gil_scoped_release release;
                e = time_average(system, scheme, h, n_steps, burn_in, seed,
                                 parse_functional(functional));
            }
            return estimate_dict(e);
        },
        py::arg("system"), py::arg("scheme"), py::arg("h"), py::arg("n_steps"),
        py::arg("burn_in"), py::arg("seed") = 1, py::arg("functional") = "exp_neg_sq_norm");

    // Experiment driver.
    m.def("list_suites", &list_suites);
    m.def(
        "run_experiment",
        [](const std::string& suite, const std::string& out_dir, std::uint64_t seed,
           std::map<std::string, std::string> settings, std::optional<std::uint64_t> samples,
           std::optional<std::vector<double>> h_grid, std::optional<std::size_t> modes,
           unsigned workers) {
            const auto parsed = parse_suite(suite);
            if (!parsed)
                throw std::invalid_argument("unknown suite '" + suite + "'; did you mean '" +
                                            std::string(suggest_suite(suite)) + "'?");
            ExperimentSpec spec;
            spec.suite = *parsed;
            spec.out_dir = out_dir;
            spec.seed = seed;
            spec.settings = std::move(settings);
            spec.samples = samples;
            spec.h_grid = std::move(h_grid);
            spec.modes = modes;
            spec.workers = workers;
            std::ostringstream log;
            ExperimentOutcome out;
            {
                py::gil_scoped_release release;
                out = run_experiment(spec, log);
            }
            py::dict d;
            d["exit_code"] = out.exit_code;
            d["files"] = out.files;
            d["failed_checks"] = out.failed_checks;
            d["summary"] = out.summary;
            d["log"] = log.str();
            return d;
        },
        py::arg("suite"), py::arg("out_dir"), py::arg("seed") = 1,
        py::arg("settings") = std::map<std::string, std::string>{},
        py::arg("samples") = py::none(), py::arg("h_grid") = py::none(),
        py::arg("modes") = py::none(), py::arg("workers") = 0);
}
