#include "ppimex/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ppimex {

std::vector<double> dirichlet_1d_eigenvalues(std::size_t n) {
    std::vector<double> lambda(n);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (std::size_t p = 0; p < n; ++p) {
        const double k = static_cast<double>(p + 1);
        lambda[p] = k * k * pi2;
    }
    return lambda;
}

SemilinearSystem SemilinearSystem::diagonal(std::vector<double> lambda,
                                            std::vector<double> noise_scale, Nonlinearity f,
                                            double sigma,
                                            std::optional<std::vector<double>> linear_decay) {
    if (lambda.empty()) throw ProblemError("system needs at least one component");
    if (noise_scale.size() != lambda.size())
        throw ProblemError("noise scale and eigenvalue vectors differ in length");
    if (linear_decay && linear_decay->size() != lambda.size())
        throw ProblemError("linear drift and eigenvalue vectors differ in length");
    for (double l : lambda)
        if (!(l >= 0.0) || !std::isfinite(l)) throw ProblemError("eigenvalues of -A must be >= 0");
    for (double s : noise_scale)
        if (!(s >= 0.0) || !std::isfinite(s)) throw ProblemError("noise scales must be >= 0");
    if (!(sigma >= 0.0)) throw ProblemError("sigma must be >= 0");
    SemilinearSystem sys;
    sys.op_ = Operator::diagonal;
    sys.lambda_ = std::move(lambda);
    sys.noise_scale_ = std::move(noise_scale);
    sys.f_ = std::move(f);
    sys.sigma_ = sigma;
    sys.decay_ = std::move(linear_decay);
    return sys;
}

SemilinearSystem SemilinearSystem::dirichlet_grid(std::size_t n_points, Nonlinearity f,
                                                  double sigma) {
    if (n_points == 0) throw ProblemError("grid needs at least one interior point");
    if (!(sigma >= 0.0)) throw ProblemError("sigma must be >= 0");
    SemilinearSystem sys;
    sys.op_ = Operator::dirichlet_grid;
    sys.dx_ = 1.0 / static_cast<double>(n_points + 1);
    sys.lambda_.resize(n_points);
    const double scale = 2.0 / (sys.dx_ * sys.dx_);
    for (std::size_t p = 0; p < n_points; ++p)
        sys.lambda_[p] =
            scale * (1.0 - std::cos(static_cast<double>(p + 1) * std::numbers::pi * sys.dx_));
    sys.noise_scale_.assign(n_points, 1.0 / std::sqrt(sys.dx_));
    sys.f_ = std::move(f);
    sys.sigma_ = sigma;
    return sys;
}

void SemilinearSystem::drift(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = dim();
    if (u.size() != n || out.size() != n) throw ProblemError("drift: dimension mismatch");
    if (decay_) {
        const auto& b = *decay_;
        for (std::size_t i = 0; i < n; ++i) out[i] = -b[i] * u[i];
        return;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = f_(u[i]);
}

void SemilinearSystem::apply_operator(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = dim();
    if (u.size() != n || out.size() != n) throw ProblemError("operator: dimension mismatch");
    if (op_ == Operator::diagonal) {
        for (std::size_t i = 0; i < n; ++i) out[i] = -lambda_[i] * u[i];
        return;
    }
    const double inv = 1.0 / (dx_ * dx_);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        out[i] = inv * (left - 2.0 * u[i] + right);
    }
}

double SemilinearSystem::squared_norm(std::span<const double> u) const {
    double s = 0.0;
    for (double x : u) s += x * x;
    return op_ == Operator::dirichlet_grid ? dx_ * s : s;
}

void SpectralProblem::validate() const {
    const std::size_t n = lambda.size();
    if (n == 0) throw ProblemError("spectral problem needs at least one mode");
    if (q.size() != n) throw ProblemError("q must have one entry per mode");
    if (!(lambda[0] > 0.0)) throw ProblemError("lambda_1 must be positive");
    for (std::size_t p = 0; p < n; ++p) {
        if (!std::isfinite(lambda[p])) throw ProblemError("eigenvalues must be finite");
        if (p > 0 && lambda[p] < lambda[p - 1])
            throw ProblemError("eigenvalues must be nondecreasing");
        if (!(q[p] >= 0.0) || !std::isfinite(q[p]))
            throw ProblemError("noise eigenvalues must be finite and >= 0");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ProblemError("sigma must be >= 0");
    if (b) {
        if (b->size() != n) throw ProblemError("b must have one entry per mode");
        for (double bp : *b)
            if (!(std::abs(bp) < lambda[0]))
                throw ProblemError("linear drift requires |b_p| < lambda_1");
    }
    if (nonlinearity && !nonlinearity->is_zero()) {
        if (b) throw ProblemError("at most one of linear drift and nonlinearity may be active");
        if (!(nonlinearity->lipschitz() < lambda[0]))
            throw ProblemError("nonlinearity violates the dissipation condition L < lambda_1");
    }
}

SemilinearSystem SpectralProblem::system() const {
    validate();
    std::vector<double> scale(q.size());
    std::transform(q.begin(), q.end(), scale.begin(), [](double v) { return std::sqrt(v); });
    return SemilinearSystem::diagonal(lambda, std::move(scale),
                                      nonlinearity.value_or(Nonlinearity{}), sigma, b);
}

SpectralProblem SpectralProblem::white_noise_heat(std::size_t n_modes, double sigma) {
    SpectralProblem p;
    p.lambda = dirichlet_1d_eigenvalues(n_modes);
    p.q.assign(n_modes, 1.0);
    p.sigma = sigma;
    return p;
}

GridProblem GridProblem::make(std::size_t n_points, Nonlinearity f, double sigma) {
    GridProblem g;
    g.n_points = n_points;
    g.dx = n_points > 0 ? 1.0 / static_cast<double>(n_points + 1) : 0.0;
    g.nonlinearity = std::move(f);
    g.sigma = sigma;
    return g;
}

void GridProblem::validate() const {
    if (n_points == 0) throw ProblemError("grid needs at least one interior point");
    const double expected = 1.0 / static_cast<double>(n_points + 1);
    if (!(std::abs(dx - expected) <= 1e-14 * expected))
        throw ProblemError("grid spacing must equal 1/(N+1)");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ProblemError("sigma must be >= 0");
}

SemilinearSystem GridProblem::system() const {
    validate();
    return SemilinearSystem::dirichlet_grid(n_points, nonlinearity, sigma);
}

std::vector<double> GridProblem::eigenvalues() const {
    validate();
    const auto sys = SemilinearSystem::dirichlet_grid(n_points, {}, 0.0);
    return {sys.lambda().begin(), sys.lambda().end()};
}

void sample_noise_increment(const SemilinearSystem& system, const NoiseStream& stream,
                            std::uint32_t step, std::span<double> out) {
    if (out.size() != system.dim()) throw ProblemError("noise: dimension mismatch");
    stream.standard_normals(step, out);
    const auto scale = system.noise_scale();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scale[i];
}

TraceDiagnostics estimate_s_bar(const SpectralProblem& problem, std::span<const double> s_grid,
                                std::span<const std::size_t> truncations, double tolerance) {
    problem.validate();
    if (s_grid.empty()) throw ProblemError("s grid is empty");
    if (truncations.size() < 2) throw ProblemError("need at least two truncation levels");
    for (std::size_t i = 0; i < truncations.size(); ++i) {
        if (truncations[i] == 0 || truncations[i] > problem.n_modes())
            throw ProblemError("truncation level outside 1..n_modes");
        if (i > 0 && truncations[i] <= truncations[i - 1])
            throw ProblemError("truncation levels must be increasing");
    }
    TraceDiagnostics out;
    out.truncations.assign(truncations.begin(), truncations.end());
    out.s_bar = 0.0;
    for (double s : s_grid) {
        if (!(s > 0.0 && s < 1.0)) throw ProblemError("s values must lie in (0,1)");
        TraceDiagnostics::Entry e{s, {}, false};
        double sum = 0.0;
        std::size_t p = 0;
        for (std::size_t level : truncations) {
            for (; p < level; ++p) sum += problem.q[p] * std::pow(problem.lambda[p], s - 1.0);
            e.partial_traces.push_back(sum);
        }
        const double last = e.partial_traces.back();
        const double prev = e.partial_traces[e.partial_traces.size() - 2];
        e.convergent = last == 0.0 || std::abs(last - prev) / last < tolerance;
        if (e.convergent) out.s_bar = std::max(out.s_bar, s);
        out.entries.push_back(std::move(e));
    }
    return out;
}

}  // namespace ppimex
