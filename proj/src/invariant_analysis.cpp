#include "ppimex/invariant_analysis.hpp"

#include <cmath>
#include <string>

namespace ppimex {

double DiagonalGaussian::trace() const {
    double s = 0.0;
    for (double v : variances) s += v;
    return s;
}

UnstableMode::UnstableMode(std::size_t index, double h)
    : std::domain_error("mode " + std::to_string(index + 1) + " is unstable at h = " +
                        std::to_string(h)),
      index_(index) {}

std::vector<double> linear_decay_of(const SpectralProblem& problem) {
    problem.validate();
    if (problem.b) return *problem.b;
    std::vector<double> b(problem.n_modes(), 0.0);
    if (problem.nonlinearity && !problem.nonlinearity->is_zero()) {
        if (problem.nonlinearity->kind() != NonlinearityKind::linear)
            throw ProblemError("Gaussian analysis needs a linear drift");
        b.assign(problem.n_modes(), problem.nonlinearity->linear_rate());
    }
    return b;
}

std::string_view chain_name(Chain chain) {
    switch (chain) {
        case Chain::exact: return "exact";
        case Chain::euler: return "euler";
        case Chain::trapezoidal: return "trapezoidal";
        case Chain::new_primary: return "new_primary";
        case Chain::new_postprocessed: return "new_postprocessed";
    }
    return "?";
}

namespace {

void check_step(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ProblemError("step size must be positive");
}

Method method_of(Chain chain) {
    switch (chain) {
        case Chain::euler: return Method::euler;
        case Chain::trapezoidal: return Method::trapezoidal;
        default: return Method::new_method;
    }
}

// Ratio of the chain's stationary variance to the exact one for one mode.
double mode_ratio(Chain chain, double z, double beta, std::size_t index, double h) {
    if (chain == Chain::exact) return 1.0;
    if (chain == Chain::new_postprocessed) {
        if (!(std::abs(RationalStability{Method::new_method}.A(z, beta)) < 1.0))
            throw UnstableMode(index, h);
        return postprocessed_moment_ratio_closed_form(z, beta);
    }
    const auto r = moment_ratio(method_of(chain), z, beta);
    if (!r) throw UnstableMode(index, h);
    return *r;
}

// Ratio minus one without cancellation for the postprocessed chain.
double mode_defect(Chain chain, double z, double beta, std::size_t index, double h) {
    if (chain == Chain::new_postprocessed) {
        if (!(std::abs(RationalStability{Method::new_method}.A(z, beta)) < 1.0))
            throw UnstableMode(index, h);
        return -postprocessed_moment_defect(z, beta);
    }
    return mode_ratio(chain, z, beta, index, h) - 1.0;
}

Chain sampled_chain(Method method) {
    switch (method) {
        case Method::euler: return Chain::euler;
        case Method::trapezoidal: return Chain::trapezoidal;
        case Method::new_method: return Chain::new_postprocessed;
    }
    return Chain::exact;
}

}  // namespace

DiagonalGaussian exact_invariant(const SpectralProblem& problem) {
    const auto b = linear_decay_of(problem);
    DiagonalGaussian g;
    g.variances.resize(problem.n_modes());
    const double s2 = problem.sigma * problem.sigma;
    for (std::size_t p = 0; p < problem.n_modes(); ++p) {
        const double rate = problem.lambda[p] + b[p];
        if (!(rate > 0.0)) throw ProblemError("lambda_p + b_p must be positive");
        g.variances[p] = s2 * problem.q[p] / (2.0 * rate);
    }
    return g;
}

DiagonalGaussian chain_invariant(const SpectralProblem& problem, Chain chain, double h) {
    check_step(h);
    const auto b = linear_decay_of(problem);
    auto g = exact_invariant(problem);
    for (std::size_t p = 0; p < g.dim(); ++p)
        g.variances[p] *= mode_ratio(chain, -problem.lambda[p] * h, -b[p] * h, p, h);
    return g;
}

DiagonalGaussian chain_invariant_by_recursion(const SpectralProblem& problem, Chain chain,
                                              double h) {
    check_step(h);
    if (chain == Chain::exact) return exact_invariant(problem);
    const auto b = linear_decay_of(problem);
    const RationalStability st{method_of(chain)};
    const double s2 = problem.sigma * problem.sigma;
    DiagonalGaussian g;
    g.variances.resize(problem.n_modes());
    for (std::size_t p = 0; p < problem.n_modes(); ++p) {
        const double z = -problem.lambda[p] * h, beta = -b[p] * h;
        const double a = st.A(z, beta);
        if (!(std::abs(a) < 1.0)) throw UnstableMode(p, h);
        const double bb = st.B(z, beta);
        // Compose v -> m v + acc with itself until the multiplier vanishes.
        double m = a * a, acc = h * s2 * problem.q[p] * bb * bb;
        for (int k = 0; k < 200 && m > 1e-300; ++k) {
            acc += m * acc;
            m *= m;
        }
        if (chain == Chain::new_postprocessed) {
            const double d = st.D(z);
            acc += h * s2 * problem.q[p] * d * d;
        }
        g.variances[p] = acc;
    }
    return g;
}

DiagonalGaussian scheme_invariant(const SpectralProblem& problem, Method method, double h) {
    return chain_invariant(problem, sampled_chain(method), h);
}

double trace_distance(const DiagonalGaussian& g1, const DiagonalGaussian& g2) {
    if (g1.dim() != g2.dim()) throw ProblemError("Gaussian laws differ in dimension");
    double s = 0.0;
    for (std::size_t p = 0; p < g1.dim(); ++p) s += std::abs(g2.variances[p] - g1.variances[p]);
    return s;
}

double trace_distance_bound(const DiagonalGaussian& g1, const DiagonalGaussian& g2,
                            double hess_sup) {
    if (!(hess_sup >= 0.0)) throw std::invalid_argument("Hessian bound must be >= 0");
    return 0.5 * hess_sup * trace_distance(g1, g2);
}

double gaussian_exp_functional(const DiagonalGaussian& g) {
    double log_value = 0.0;
    for (double v : g.variances) log_value -= 0.5 * std::log1p(2.0 * v);
    return std::exp(log_value);
}

double trace_distance_lower_bound(const DiagonalGaussian& g1, const DiagonalGaussian& g2) {
    if (g1.dim() != g2.dim()) throw ProblemError("Gaussian laws differ in dimension");
    double gap = 0.0;
    for (std::size_t p = 0; p < g1.dim(); ++p) {
        if (g2.variances[p] < g1.variances[p])
            throw std::invalid_argument("lower bound needs q2 >= q1 componentwise");
        gap += g2.variances[p] - g1.variances[p];
    }
    return gap / std::exp(6.0 * g2.trace());
}

OrderStudy convergence_order_study(const SpectralProblem& problem, Method method,
                                   std::span<const double> h_grid, double tail_tolerance) {
    if (h_grid.empty()) throw std::invalid_argument("order study needs step sizes");
    const auto b = linear_decay_of(problem);
    const auto exact = exact_invariant(problem);
    const Chain chain = sampled_chain(method);
    const std::size_t n = problem.n_modes();
    const std::size_t half = n / 2;
    OrderStudy out;
    for (double h : h_grid) {
        check_step(h);
        double full = 0.0, first_half = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double d = std::abs(exact.variances[p] *
                                      mode_defect(chain, -problem.lambda[p] * h, -b[p] * h, p, h));
            full += d;
            if (p + 1 == half) first_half = full;
        }
        const double tail = full > 0.0 ? (full - first_half) / full : 0.0;
        if (tail > tail_tolerance)
            throw TruncationError("trace distance at h = " + std::to_string(h) +
                                  " is not converged in the truncation (relative tail " +
                                  std::to_string(tail) + ")");
        out.h.push_back(h);
        out.distance.push_back(full);
        out.tail_ratio.push_back(tail);
    }
    bool all_zero = true, any_zero = false;
    for (double d : out.distance) {
        all_zero = all_zero && d == 0.0;
        any_zero = any_zero || d == 0.0;
    }
    out.exact = all_zero;
    if (!any_zero && out.h.size() >= 2) out.fit = fit_loglog(out.h, out.distance);
    return out;
}

RegularityProfile regularity_profile(const SpectralProblem& problem, Chain chain, double h,
                                     std::span<const double> s_grid, double divergence_ratio) {
    if (s_grid.empty()) throw std::invalid_argument("regularity profile needs an s grid");
    if (problem.n_modes() < 4) throw ProblemError("regularity profile needs at least 4 modes");
    for (double bp : linear_decay_of(problem))
        if (bp != 0.0) throw ProblemError("regularity profile requires F = 0");
    const auto g = chain == Chain::exact ? exact_invariant(problem)
                                         : chain_invariant(problem, chain, h);
    const std::size_t n = problem.n_modes(), half = n / 2;
    RegularityProfile out;
    for (double s : s_grid) {
        double full = 0.0, first_half = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            full += g.variances[p] * std::pow(problem.lambda[p], s);
            if (p + 1 == half) first_half = full;
        }
        const bool ok = first_half > 0.0 ? full / first_half <= divergence_ratio : full == 0.0;
        out.s_values.push_back(s);
        out.moments.push_back(full);
        out.half_moments.push_back(first_half);
        out.convergent.push_back(ok);
        if (ok) out.reg_estimate = std::max(out.reg_estimate, s);
    }
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad grid bounds");
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

}  // namespace ppimex
