#include "ppimex/order_conditions.hpp"

#include <algorithm>
#include <cmath>

namespace ppimex {

double ConditionResiduals::max_abs() const {
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4)});
}

ConditionResiduals check_conditions(const SchemeCoefficients& k) {
    const double c2 = k.c * k.c;
    ConditionResiduals r;
    r.r1 = k.a1 * k.a1 + 2.0 * k.a1 + k.b1 - c2;
    r.r2 = k.a1 + k.a3 + 0.25 + k.b1 - c2;
    r.r3 = k.a2 * k.a2 + k.b2 - c2;
    r.r4 = -0.25 + k.a2 + k.b2 - c2;
    r.commutator_required = k.b1 != k.b2;
    return r;
}

std::vector<SchemeCoefficients> solve_family(double b1, double b2) {
    if (b1 != b2)
        throw std::invalid_argument("order-two family requires b1 == b2 for general fields");
    const double b = b1;
    if (!(b >= -0.25)) throw NoRealSolution("no real coefficients for b < -1/4");
    // r3 - r4 forces (a2 - 1/2)^2 = 0, then r1 gives a1^2 + 2 a1 - 1/4 = 0
    // and r2 gives a3 = -a1.
    const double c = std::sqrt(0.25 + b);
    const double root = std::sqrt(5.0) / 2.0;
    std::vector<SchemeCoefficients> out;
    for (double a1 : {-1.0 + root, -1.0 - root})
        out.push_back({a1, 0.5, -a1, b, b, c});
    return out;
}

LocalOrderResult estimate_local_weak_order(Scheme scheme, const LocalOrderConfig& cfg,
                                           const std::function<double(double)>& phi_in) {
    if (cfg.h_grid.size() < 4) throw std::invalid_argument("local order fit needs >= 4 step sizes");
    if (cfg.n_samples < 2) throw std::invalid_argument("local order fit needs samples");
    const double ratio = cfg.h_grid[1] / cfg.h_grid[0];
    for (std::size_t i = 1; i < cfg.h_grid.size(); ++i)
        if (std::abs(cfg.h_grid[i] / cfg.h_grid[i - 1] - ratio) > 1e-9 * std::abs(ratio))
            throw std::invalid_argument("local order fit needs a geometric step grid");
    const auto phi = phi_in ? phi_in : [](double x) { return x * x; };

    const auto system = SemilinearSystem::diagonal({cfg.lambda}, {1.0}, Nonlinearity{},
                                                   cfg.sigma, std::vector<double>{cfg.b});
    const double rate = cfg.lambda + cfg.b;
    LocalOrderResult out;
    const bool deterministic = cfg.sigma == 0.0;
    for (double h : cfg.h_grid) {
        const Stepper stepper(system, h);
        StepWorkspace ws(1);
        const double decay = std::exp(-rate * h);
        const double sd = cfg.sigma * std::sqrt((1.0 - decay * decay) / (2.0 * rate));
        RunningStats diff;
        const std::uint64_t n = deterministic ? 1 : cfg.n_samples;
        double u = cfg.x0, next = 0.0, xi = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const NoiseStream stream(cfg.seed, i);
            stream.standard_normals(0, std::span<double>(&xi, 1));
            stepper.step(scheme, std::span<const double>(&u, 1), std::span<const double>(&xi, 1),
                         std::span<double>(&next, 1), ws);
            const double exact = decay * cfg.x0 + sd * xi;
            diff.add(phi(next) - phi(exact));
        }
        out.h.push_back(h);
        out.error.push_back(diff.mean());
        out.std_error.push_back(diff.stderr_of_mean());
    }
    std::vector<double> abs_err(out.error.size());
    for (std::size_t i = 0; i < abs_err.size(); ++i) {
        abs_err[i] = std::abs(out.error[i]);
        if (abs_err[i] < 3.0 * out.std_error[i]) out.noise_dominated = true;
    }
    if (std::any_of(abs_err.begin(), abs_err.end(), [](double e) { return !(e > 0.0); })) {
        out.noise_dominated = true;
        return out;
    }
    out.fit = fit_loglog(out.h, abs_err);
    if (out.fit.residual_rms > 0.25) out.noise_dominated = true;
    return out;
}

}  // namespace ppimex
