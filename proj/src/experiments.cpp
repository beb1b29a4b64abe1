#include "ppimex/experiments.hpp"

#include "ppimex/integrators.hpp"
#include "ppimex/invariant_analysis.hpp"
#include "ppimex/montecarlo.hpp"
#include "ppimex/order_conditions.hpp"
#include "ppimex/resolvent.hpp"
#include "ppimex/stability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

#ifndef PPIMEX_VERSION
#define PPIMEX_VERSION "0.0.0"
#endif

namespace ppimex {

namespace {

constexpr SuiteInfo kSuites[] = {
    {Suite::stability, "stability",
     "stability functions R and Rbar on (z, beta) grids, error-bound check, L-stability classes"},
    {Suite::conditions, "conditions",
     "residuals of the order-two conditions for given coefficients and the b1 = b2 family"},
    {Suite::gaussian_order, "gaussian_order",
     "exact trace distance between sampled and true invariant laws of a linear problem, with slopes"},
    {Suite::regularity, "regularity",
     "truncated Sobolev moments of stationary laws and regularity estimates per chain"},
    {Suite::mc_sde, "mc_sde",
     "Monte-Carlo weak errors on a scalar nonlinear SDE against a coupled fine-step reference"},
    {Suite::mc_spde, "mc_spde",
     "Monte-Carlo weak errors on the finite-difference heat equation and error ratios"},
    {Suite::trajectory_demo, "trajectory_demo",
     "space-time sample paths of the Euler and postprocessed schemes on shared noise"},
};

std::string fr(double x) { return format_real(x); }

std::string join_reals(std::span<const double> xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        s += fr(xs[i]);
    }
    return s;
}

class Csv {
public:
    Csv(const std::filesystem::path& path, const std::string& header,
        std::initializer_list<std::string_view> columns)
        : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
        out_ << header;
        bool first = true;
        for (auto c : columns) {
            out_ << (first ? "" : ",") << c;
            first = false;
        }
        out_ << '\n';
    }
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            out_ << (first ? "" : ",") << c;
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

struct Context {
    const ExperimentSpec& spec;
    KeyValues kv;
    std::vector<std::pair<std::string, std::string>> manifest;
    ExperimentOutcome outcome;
    std::ostream& log;

    void record(const std::string& key, const std::string& value) {
        manifest.emplace_back(key, value);
    }

    std::optional<std::string> take(const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    }
    double real(const std::string& key, double def) {
        const auto v = take(key);
        const double x = v ? parse_real(*v) : def;
        record(key, fr(x));
        return x;
    }
    std::uint64_t count(const std::string& key, std::uint64_t def) {
        const auto v = take(key);
        const std::uint64_t x = v ? parse_unsigned(*v) : def;
        record(key, std::to_string(x));
        return x;
    }
    std::string text(const std::string& key, const std::string& def) {
        const auto v = take(key);
        const std::string x = v.value_or(def);
        record(key, x);
        return x;
    }
    std::vector<double> reals(const std::string& key, std::vector<double> def) {
        const auto v = take(key);
        auto x = v ? parse_real_list(*v) : std::move(def);
        record(key, join_reals(x));
        return x;
    }
    std::vector<double> h_grid(std::vector<double> def) {
        if (kv.count("h_grid") && spec.h_grid)
            throw ConfigError("h_grid given both in the config and on the command line");
        if (spec.h_grid) def = *spec.h_grid;
        auto x = reals("h_grid", std::move(def));
        for (double h : x)
            if (!(h > 0.0)) throw ConfigError("step sizes must be positive");
        return x;
    }
    std::uint64_t samples(std::uint64_t def) {
        if (kv.count("samples") && spec.samples)
            throw ConfigError("samples given both in the config and on the command line");
        if (spec.samples) def = *spec.samples;
        const auto n = count("samples", def);
        if (n == 0) throw ConfigError("samples must be positive");
        return n;
    }
    std::size_t modes(std::size_t def) const { return spec.modes.value_or(def); }

    ProblemConfig problem(ProblemConfig defaults, bool require_dissipation = true) {
        if (spec.modes) {
            if (kv.count("n")) throw ConfigError("n given both in the config and as --modes");
            defaults.n = *spec.modes;
        }
        auto cfg = take_problem_config(kv, defaults, require_dissipation);
        for (auto& [k, v] : cfg.entries()) record(k, v);
        return cfg;
    }

    std::string header() const {
        std::ostringstream os;
        os << "# ppimex " << version() << '\n';
        for (const auto& [k, v] : manifest) os << "# " << k << " = " << v << '\n';
        return os.str();
    }
    Csv csv(const std::string& name, std::initializer_list<std::string_view> columns) {
        const auto path = spec.out_dir / name;
        outcome.files.push_back(path);
        return Csv(path, header(), columns);
    }
    void check(bool ok, const std::string& what) {
        log << (ok ? "  ok    " : "  FAIL  ") << what << '\n';
        if (!ok) outcome.failed_checks.push_back(what);
    }
    void finish_keys() {
        if (!kv.empty()) {
            std::string names;
            for (const auto& [k, v] : kv) names += (names.empty() ? "" : ", ") + k;
            throw ConfigError("unknown key(s) for suite " + std::string(suite_name(spec.suite)) +
                              ": " + names);
        }
    }
};

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::pow(10.0, n == 1 ? a : a + (b - a) * static_cast<double>(i) /
                                                      static_cast<double>(n - 1));
    return out;
}

std::string opt(const std::optional<double>& x) { return x ? fr(*x) : "unstable"; }

// ---------------------------------------------------------------- stability
void run_stability(Context& ctx) {
    const double z_min = ctx.real("z_min", 1e-6);
    const double z_max = ctx.real("z_max", 1e6);
    const auto z_points = ctx.count("z_points", 1000);
    const auto betas = ctx.reals("beta", {-0.9, -0.5, -0.1, 0.0, 0.1, 0.5, 0.9});
    const auto bound_points = ctx.count("bound_points", 100);
    ctx.finish_keys();
    if (!(z_min > 0.0 && z_max > z_min) || z_points < 2 || bound_points < 2)
        throw ConfigError("bad z grid");

    std::vector<double> zs = log_grid(z_min, z_max, z_points);
    for (double& z : zs) z = -z;
    auto table = ctx.csv("stability.csv",
                         {"method", "z", "beta", "A", "B", "R", "R_bar", "R_bar_closed", "bound"});
    double worst_exact = 0.0;
    for (Method m : {Method::euler, Method::trapezoidal, Method::new_method}) {
        const RationalStability st{m};
        for (double z : zs) {
            for (double beta : betas) {
                if (beta != 0.0 && !(beta > -1.0 && beta < std::min(1.0, std::abs(z)))) continue;
                const auto r = moment_ratio(m, z, beta);
                const auto rb = postprocessed_moment_ratio(m, z, beta);
                const bool is_new = m == Method::new_method;
                table.row({std::string(method_name(m)), fr(z), fr(beta), fr(st.A(z, beta)),
                           fr(st.B(z, beta)), opt(r), opt(rb),
                           is_new ? fr(postprocessed_moment_ratio_closed_form(z, beta)) : "",
                           is_new ? fr(postprocessed_error_bound(z, beta)) : ""});
                if (is_new && beta == 0.0)
                    worst_exact = std::max(worst_exact, rb ? std::abs(*rb - 1.0) : 1.0);
            }
        }
    }
    ctx.check(worst_exact <= 1e-10, "new method Rbar(z,0) = 1 within 1e-10 (max dev " +
                                        fr(worst_exact) + ")");

    auto zb = log_grid(1e-3, 1e3, bound_points);
    for (double& z : zb) z = -z;
    const auto half = log_grid(0.01, 0.99, bound_points / 2);
    std::vector<double> bb;
    for (double b : half) bb.push_back(-b);
    for (double b : half) bb.push_back(b);
    const auto bound = check_postprocessed_error_bound(zb, bb);
    ctx.check(bound.holds(), "error bound |1-Rbar| <= |z beta|(15-6sqrt2)/(4(1-z)^2), max ratio " +
                                 fr(bound.max_ratio) + " over " +
                                 std::to_string(bound.evaluated) + " points");

    auto classes = ctx.csv("stability_classes.csv", {"method", "abs_A_at_z_minus_1e12", "class"});
    const std::pair<Method, StabilityClass> expected[] = {
        {Method::euler, StabilityClass::L_stable},
        {Method::trapezoidal, StabilityClass::A_stable_only},
        {Method::new_method, StabilityClass::L_stable}};
    for (auto [m, want] : expected) {
        const auto got = l_stability_verdict(m);
        classes.row({std::string(method_name(m)), fr(std::abs(RationalStability{m}.A(-1e12))),
                     std::string(stability_class_name(got))});
        ctx.check(got == want, std::string(method_name(m)) + " is " +
                                   std::string(stability_class_name(want)));
    }
    ctx.outcome.summary = "Rbar(z,0) max deviation " + fr(worst_exact) + "; bound ratio max " +
                          fr(bound.max_ratio);
}

// --------------------------------------------------------------- conditions
void run_conditions(Context& ctx) {
    const auto canon = SchemeCoefficients::canonical();
    SchemeCoefficients k;
    k.a1 = ctx.real("a1", canon.a1);
    k.a2 = ctx.real("a2", canon.a2);
    k.a3 = ctx.real("a3", canon.a3);
    k.b1 = ctx.real("b1", canon.b1);
    k.b2 = ctx.real("b2", canon.b2);
    k.c = ctx.real("c", canon.c);
    const double b = ctx.real("family_b", 0.0);
    ctx.finish_keys();

    auto table = ctx.csv("residuals.csv", {"label", "a1", "a2", "a3", "b1", "b2", "c", "r1", "r2",
                                           "r3", "r4", "commutator_required"});
    auto emit = [&](const std::string& label, const SchemeCoefficients& s) {
        const auto r = check_conditions(s);
        table.row({label, fr(s.a1), fr(s.a2), fr(s.a3), fr(s.b1), fr(s.b2), fr(s.c), fr(r.r1),
                   fr(r.r2), fr(r.r3), fr(r.r4), r.commutator_required ? "true" : "false"});
        return r;
    };
    const auto input = emit("input", k);
    std::vector<SchemeCoefficients> family;
    try {
        family = solve_family(b, b);
    } catch (const NoRealSolution& e) {
        ctx.log << "  family: " << e.what() << '\n';
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto r = emit("family_" + std::to_string(i + 1), family[i]);
        ctx.check(r.satisfied(1e-14), "family solution " + std::to_string(i + 1) +
                                          " satisfies the conditions");
    }
    const bool ok = input.satisfied(1e-14);
    ctx.outcome.summary = ok ? "all residuals 0"
                             : "residuals nonzero (max |r| = " + fr(input.max_abs()) +
                                   (input.commutator_required ? ", b1 != b2" : "") + ")";
    ctx.check(ok, "input coefficients satisfy the order-two conditions");
}

// ----------------------------------------------------------- gaussian_order
std::vector<double> dyadic(int from, int to) {
    std::vector<double> h;
    for (int k = from; k <= to; ++k) h.push_back(std::ldexp(1.0, -k));
    return h;
}

void run_gaussian_order(Context& ctx) {
    ProblemConfig defaults;
    defaults.n = 100000;
    defaults.b = "1";
    const auto cfg = ctx.problem(defaults);
    const auto hs = ctx.h_grid(dyadic(3, 10));
    const double tail_tol = ctx.real("tail_tolerance", 0.01);
    ctx.finish_keys();
    const auto problem = cfg.spectral();

    std::vector<OrderStudy> studies;
    const Method methods[] = {Method::euler, Method::trapezoidal, Method::new_method};
    for (Method m : methods) studies.push_back(convergence_order_study(problem, m, hs, tail_tol));

    auto table = ctx.csv("order.csv", {"h", "D_euler", "D_trapezoidal", "D_new", "tail_euler",
                                       "tail_trapezoidal", "tail_new"});
    for (std::size_t i = 0; i < hs.size(); ++i)
        table.row({fr(hs[i]), fr(studies[0].distance[i]), fr(studies[1].distance[i]),
                   fr(studies[2].distance[i]), fr(studies[0].tail_ratio[i]),
                   fr(studies[1].tail_ratio[i]), fr(studies[2].tail_ratio[i])});
    auto slopes = ctx.csv("order_slopes.csv",
                          {"method", "slope", "slope_stderr", "intercept", "exact"});
    std::ostringstream summary;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& s = studies[k];
        slopes.row({std::string(method_name(methods[k])), s.fit ? fr(s.fit->slope) : "",
                    s.fit ? fr(s.fit->slope_stderr) : "", s.fit ? fr(s.fit->intercept) : "",
                    s.exact ? "true" : "false"});
        summary << method_name(methods[k]) << ' '
                << (s.exact ? std::string("exact") : s.fit ? fr(s.fit->slope) : "n/a") << "; ";
    }
    const auto b = linear_decay_of(problem);
    const bool b_zero = std::all_of(b.begin(), b.end(), [](double x) { return x == 0.0; });
    if (b_zero) {
        const double worst = *std::max_element(studies[2].distance.begin(),
                                               studies[2].distance.end());
        ctx.check(worst <= 1e-14, "new method is exact without linear drift");
    } else {
        bool better = true;
        for (std::size_t i = 0; i < hs.size(); ++i)
            better = better && studies[2].distance[i] < studies[0].distance[i];
        ctx.check(better, "new method distance below Euler at every step size");
    }
    ctx.outcome.summary = "slopes: " + summary.str();
}

// --------------------------------------------------------------- regularity
void run_regularity(Context& ctx) {
    ProblemConfig defaults;
    defaults.n = 100000;
    const auto cfg = ctx.problem(defaults);
    const double h = ctx.real("h", 1.0 / 64.0);
    const double s_min = ctx.real("s_min", 0.0);
    const double s_max = ctx.real("s_max", 2.0);
    const double s_step = ctx.real("s_step", 0.01);
    const double ratio = ctx.real("divergence_ratio", 1.05);
    ctx.finish_keys();
    const auto problem = cfg.spectral();
    const auto grid = uniform_grid(s_min, s_max, s_step);

    auto table = ctx.csv("regularity.csv",
                         {"chain", "s", "moment", "half_moment", "convergent"});
    auto summary = ctx.csv("regularity_summary.csv", {"chain", "reg_estimate"});
    std::vector<std::pair<Chain, double>> regs;
    for (Chain c : {Chain::exact, Chain::euler, Chain::trapezoidal, Chain::new_primary,
                    Chain::new_postprocessed}) {
        const auto prof = regularity_profile(problem, c, h, grid, ratio);
        bool monotone = true;
        for (std::size_t i = 0; i < prof.s_values.size(); ++i) {
            table.row({std::string(chain_name(c)), fr(prof.s_values[i]), fr(prof.moments[i]),
                       fr(prof.half_moments[i]), prof.convergent[i] ? "true" : "false"});
            if (i > 0 && prof.convergent[i] && !prof.convergent[i - 1]) monotone = false;
        }
        summary.row({std::string(chain_name(c)), fr(prof.reg_estimate)});
        ctx.check(monotone, std::string(chain_name(c)) + " verdicts are monotone in s");
        regs.emplace_back(c, prof.reg_estimate);
    }
    auto reg = [&](Chain c) {
        for (auto [k, v] : regs)
            if (k == c) return v;
        return 0.0;
    };
    ctx.check(std::abs(reg(Chain::new_postprocessed) - reg(Chain::exact)) <= 0.05,
              "postprocessed chain has the regularity of the exact law");
    ctx.check(reg(Chain::new_primary) >= reg(Chain::exact) + 0.9,
              "primary chain is smoother than the exact law by about one");
    std::ostringstream os;
    for (auto [c, v] : regs) os << chain_name(c) << ' ' << fr(v) << "; ";
    ctx.outcome.summary = "regularity estimates: " + os.str();
}

// ---------------------------------------------------------------- mc suites
std::vector<Scheme> parse_schemes(const std::string& text) {
    std::vector<Scheme> out;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',' || ch == ' ') {
            if (!cur.empty()) {
                try {
                    out.push_back(parse_scheme(cur));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
            }
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (out.empty()) throw ConfigError("no schemes given");
    return out;
}

struct McRun {
    CoupledResult result;
    std::vector<Scheme> schemes;
};

McRun run_mc(Context& ctx, const SemilinearSystem& system, std::vector<double> default_h,
             std::uint64_t default_samples, const std::string& default_schemes) {
    McConfig mc;
    mc.h_grid = ctx.h_grid(std::move(default_h));
    mc.n_samples = ctx.samples(default_samples);
    mc.T = ctx.real("T", 1.0);
    mc.h_ref = ctx.real("h_ref", 0.0);
    mc.functional = parse_functional(ctx.text("functional", "exp_neg_sq_norm"));
    mc.block_size = ctx.count("block_size", 256);
    const auto schemes = parse_schemes(ctx.text("schemes", default_schemes));
    ctx.finish_keys();
    mc.seed = ctx.spec.seed;
    mc.workers = ctx.spec.workers;
    mc.reference = ReferenceKind::fine_step;
    McRun run{coupled_compare(system, schemes, mc), schemes};

    auto table = ctx.csv("mc.csv", {"scheme", "h", "steps", "estimate", "stderr",
                                    "error_vs_reference", "error_stderr", "n_samples", "seed"});
    const auto& ref = run.result.reference;
    table.row({"reference", fr(run.result.base_step),
               std::to_string(static_cast<std::uint64_t>(std::llround(mc.T / run.result.base_step))),
               fr(ref.mean), fr(ref.std_error), "0", "0", std::to_string(ref.n),
               std::to_string(ref.seed)});
    for (const auto& e : run.result.entries)
        table.row({std::string(scheme_name(e.scheme)), fr(e.h), std::to_string(e.steps),
                   fr(e.estimate.mean), fr(e.estimate.std_error), fr(e.error.mean),
                   fr(e.error.std_error), std::to_string(e.estimate.n),
                   std::to_string(e.estimate.seed)});

    auto fits = ctx.csv("mc_fits.csv", {"scheme", "slope", "slope_stderr", "used", "excluded_h"});
    for (Scheme s : schemes) {
        std::vector<ErrorPoint> pts;
        for (const auto& e : run.result.entries)
            if (e.scheme == s) pts.push_back({e.h, e.error.mean, e.error.std_error});
        std::string slope, se, used, excluded;
        try {
            const auto fit = global_order_fit(pts);
            slope = fr(fit.slope);
            se = fr(fit.slope_stderr);
            used = std::to_string(fit.used.size());
            for (const auto& p : fit.excluded) excluded += (excluded.empty() ? "" : " ") + fr(p.h);
        } catch (const std::invalid_argument& e) {
            ctx.log << "  " << scheme_name(s) << ": no slope (" << e.what() << ")\n";
        }
        fits.row({std::string(scheme_name(s)), slope, se, used, excluded});
    }
    ctx.log << "  failures: " << run.result.failures << '\n';
    return run;
}

void run_mc_sde(Context& ctx) {
    ProblemConfig defaults;
    defaults.n = 1;
    defaults.lambda_law = "1";
    defaults.nonlinearity = "sin";
    const auto cfg = ctx.problem(defaults, false);
    const auto system = cfg.sde_system();
    const auto run = run_mc(ctx, system, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}, 100000,
                            "euler,trapezoidal,new");
    const auto has = [&](Scheme s) {
        return std::find(run.schemes.begin(), run.schemes.end(), s) != run.schemes.end();
    };
    if (has(Scheme::postprocessed) && has(Scheme::linearized_euler)) {
        bool better = true;
        for (const auto& e : run.result.entries)
            if (e.scheme == Scheme::postprocessed)
                better = better && std::abs(e.error.mean) <
                                       std::abs(run.result.entry(Scheme::linearized_euler, e.h)
                                                    .error.mean);
        ctx.check(better, "new method error below Euler error at every step size");
    }
    ctx.outcome.summary = "reference " + fr(run.result.reference.mean) + " +- " +
                          fr(run.result.reference.std_error);
}

void run_mc_spde(Context& ctx) {
    ProblemConfig defaults;
    defaults.model = ProblemConfig::Model::grid;
    defaults.n = 32;
    defaults.nonlinearity = "linear:1";
    const auto cfg = ctx.problem(defaults);
    const auto system = cfg.system();
    const auto run = run_mc(ctx, system, {1.0 / 32}, 100000, "euler,trapezoidal,new");
    const auto has = [&](Scheme s) {
        return std::find(run.schemes.begin(), run.schemes.end(), s) != run.schemes.end();
    };
    if (!has(Scheme::postprocessed) || !has(Scheme::linearized_euler)) return;
    auto table = ctx.csv("error_ratio.csv", {"h", "error_euler", "error_new", "ratio"});
    std::ostringstream summary;
    for (const auto& e : run.result.entries) {
        if (e.scheme != Scheme::postprocessed) continue;
        const double eu = run.result.entry(Scheme::linearized_euler, e.h).error.mean;
        const double ratio = std::abs(eu / e.error.mean);
        table.row({fr(e.h), fr(eu), fr(e.error.mean), fr(ratio)});
        ctx.check(ratio > 5.0, "error ratio euler/new > 5 at h = " + fr(e.h) + " (" + fr(ratio) +
                                   ")");
        summary << "h " << fr(e.h) << " ratio " << fr(ratio) << "; ";
    }
    ctx.outcome.summary = summary.str();
}

// ---------------------------------------------------------- trajectory_demo
void run_trajectory_demo(Context& ctx) {
    ProblemConfig defaults;
    defaults.model = ProblemConfig::Model::grid;
    defaults.n = 100;
    defaults.nonlinearity = "sin";
    const auto cfg = ctx.problem(defaults);
    const double h = ctx.real("h", 1.0 / 100.0);
    const double T = ctx.real("T", 1.0);
    const auto stride = ctx.count("stride", 1);
    const auto s_grid = ctx.reals("s", {0.0, 0.25, 0.5, 0.75, 1.0, 1.5});
    ctx.finish_keys();
    const auto system = cfg.system();
    const std::size_t n = system.dim();
    const double dx = system.dx();
    std::vector<double> u0(n);
    for (std::size_t j = 0; j < n; ++j)
        u0[j] = std::sin(2.0 * std::numbers::pi * static_cast<double>(j + 1) * dx);
    const auto steps = static_cast<std::uint64_t>(std::llround(T / h));
    if (steps == 0) throw ConfigError("T must cover at least one step");
    const Stepper stepper(system, h);
    const auto basis = sine_basis(n);
    auto sobolev = ctx.csv("sobolev.csv", {"scheme", "s", "norm_sq"});
    for (Scheme s : {Scheme::linearized_euler, Scheme::postprocessed}) {
        const std::string name =
            s == Scheme::postprocessed ? "trajectory_new.txt" : "trajectory_euler.txt";
        const auto path = ctx.spec.out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + path.string() + "'");
        out << ctx.header() << "# step_index t u_1 ... u_N\n" << std::setprecision(10);
        ctx.outcome.files.push_back(path);
        PathRecorder rec(out, stride);
        const auto res = run_trajectory(stepper, s, steps, ctx.spec.seed, 0, u0, &rec);
        // Coefficients in the discrete sine basis, orthonormal for dx sum u_j v_j.
        for (double sv : s_grid) {
            double acc = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                double c = 0.0;
                for (std::size_t j = 0; j < n; ++j) c += basis[j * n + p] * res.u_bar[j];
                c *= std::sqrt(dx);
                acc += std::pow(system.lambda()[p], sv) * c * c;
            }
            sobolev.row({std::string(scheme_name(s)), fr(sv), fr(acc)});
        }
    }
    ctx.outcome.summary = "wrote " + std::to_string(steps) + " steps per scheme";
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

std::string_view version() { return PPIMEX_VERSION; }

std::span<const SuiteInfo> suites() { return kSuites; }

std::optional<Suite> parse_suite(std::string_view name) {
    for (const auto& s : kSuites)
        if (s.name == name) return s.suite;
    return std::nullopt;
}

std::string_view suite_name(Suite suite) {
    for (const auto& s : kSuites)
        if (s.suite == suite) return s.name;
    return "?";
}

std::string_view suggest_suite(std::string_view name) {
    std::string_view best = kSuites[0].name;
    std::size_t best_d = static_cast<std::size_t>(-1);
    for (const auto& s : kSuites) {
        const auto d = edit_distance(name, s.name);
        if (d < best_d) {
            best_d = d;
            best = s.name;
        }
    }
    return best;
}

std::string list_suites() {
    std::ostringstream os;
    os << "Available suites:\n";
    for (const auto& s : kSuites)
        os << "  " << std::left << std::setw(16) << s.name << s.description << '\n';
    return os.str();
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec, std::ostream& log) {
    Context ctx{spec, spec.settings, {}, {}, log};
    ctx.record("suite", std::string(suite_name(spec.suite)));
    ctx.record("seed", std::to_string(spec.seed));
    log << "suite " << suite_name(spec.suite) << '\n';
    try {
        std::filesystem::create_directories(spec.out_dir);
        switch (spec.suite) {
            case Suite::stability: run_stability(ctx); break;
            case Suite::conditions: run_conditions(ctx); break;
            case Suite::gaussian_order: run_gaussian_order(ctx); break;
            case Suite::regularity: run_regularity(ctx); break;
            case Suite::mc_sde: run_mc_sde(ctx); break;
            case Suite::mc_spde: run_mc_spde(ctx); break;
            case Suite::trajectory_demo: run_trajectory_demo(ctx); break;
        }
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        ctx.outcome.exit_code = kExitConfig;
        ctx.outcome.summary = e.what();
        return ctx.outcome;
    } catch (const ProblemError& e) {
        log << "configuration error: " << e.what() << '\n';
        ctx.outcome.exit_code = kExitConfig;
        ctx.outcome.summary = e.what();
        return ctx.outcome;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "output error: " << e.what() << '\n';
        ctx.outcome.exit_code = kExitConfig;
        ctx.outcome.summary = e.what();
        return ctx.outcome;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << '\n';
        ctx.outcome.exit_code = kExitNumerical;
        ctx.outcome.summary = e.what();
        return ctx.outcome;
    }
    const auto manifest_path = spec.out_dir / "manifest.txt";
    std::ofstream manifest(manifest_path, std::ios::binary);
    manifest << "version = " << version() << '\n';
    for (const auto& [k, v] : ctx.manifest) manifest << k << " = " << v << '\n';
    ctx.outcome.files.push_back(manifest_path);
    ctx.outcome.exit_code = ctx.outcome.failed_checks.empty() ? kExitOk : kExitAssertion;
    log << ctx.outcome.summary << '\n';
    return ctx.outcome;
}

}  // namespace ppimex
