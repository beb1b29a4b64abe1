#include "ppimex/integrators.hpp"

#include <cmath>
#include <numbers>

namespace ppimex {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kExplicitShare = (kSqrt2 - 1.0) / 2.0;
}  // namespace

std::string_view scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::linearized_euler: return "euler";
        case Scheme::trapezoidal: return "trapezoidal";
        case Scheme::postprocessed: return "new_method";
    }
    return "?";
}

Scheme parse_scheme(std::string_view text) {
    if (text == "euler" || text == "linearized_euler") return Scheme::linearized_euler;
    if (text == "trapezoidal" || text == "crank_nicolson") return Scheme::trapezoidal;
    if (text == "new" || text == "new_method" || text == "postprocessed")
        return Scheme::postprocessed;
    throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

Stepper::Stepper(SemilinearSystem system, double h)
    : system_(std::move(system)),
      h_(h),
      noise_factor_(system_.sigma() * std::sqrt(h)),
      resolvents_(system_, h) {}

void Stepper::check(std::span<const double> u, std::span<const double> xi,
                    std::span<double> out) const {
    const std::size_t n = dim();
    if (u.size() != n || xi.size() != n || out.size() != n)
        throw ProblemError("step: dimension mismatch");
}

void Stepper::euler(std::span<const double> u, std::span<const double> xi,
                    std::span<double> out, StepWorkspace& ws) const {
    check(u, xi, out);
    const std::size_t n = dim();
    std::span<double> f(ws.a.data(), n);
    system_.drift(u, f);
    for (std::size_t i = 0; i < n; ++i) f[i] = u[i] + h_ * f[i] + noise_factor_ * xi[i];
    resolvents_.apply(ResolventKind::J1, f, out);
}

void Stepper::trapezoidal(std::span<const double> u, std::span<const double> xi,
                          std::span<double> out, StepWorkspace& ws) const {
    check(u, xi, out);
    const std::size_t n = dim();
    std::span<double> f(ws.a.data(), n);
    std::span<double> au(ws.b.data(), n);
    system_.drift(u, f);
    system_.apply_operator(u, au);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = u[i] + 0.5 * h_ * au[i] + h_ * f[i] + noise_factor_ * xi[i];
    resolvents_.apply_half(f, out);
}

void Stepper::postprocessed(std::span<const double> u, std::span<const double> xi,
                            std::span<double> out, StepWorkspace& ws) const {
    check(u, xi, out);
    const std::size_t n = dim();
    std::span<double> w(ws.a.data(), n);
    std::span<double> arg(ws.b.data(), n);
    std::span<double> f(ws.c.data(), n);
    for (std::size_t i = 0; i < n; ++i) w[i] = noise_factor_ * xi[i];
    resolvents_.apply(ResolventKind::J2, w, w);
    for (std::size_t i = 0; i < n; ++i) arg[i] = u[i] + 0.5 * w[i];
    system_.drift(arg, f);
    for (std::size_t i = 0; i < n; ++i) arg[i] = u[i] + h_ * f[i] + kExplicitShare * w[i];
    resolvents_.apply(ResolventKind::J1, arg, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += kGamma * w[i];
}

void Stepper::postprocess(std::span<const double> u, std::span<const double> xi,
                          std::span<double> out, StepWorkspace& ws) const {
    check(u, xi, out);
    const std::size_t n = dim();
    std::span<double> w(ws.a.data(), n);
    resolvents_.apply(ResolventKind::J3, xi, w);
    for (std::size_t i = 0; i < n; ++i) out[i] = u[i] + 0.5 * noise_factor_ * w[i];
}

void Stepper::step(Scheme scheme, std::span<const double> u, std::span<const double> xi,
                   std::span<double> out, StepWorkspace& ws) const {
    switch (scheme) {
        case Scheme::linearized_euler: euler(u, xi, out, ws); return;
        case Scheme::trapezoidal: trapezoidal(u, xi, out, ws); return;
        case Scheme::postprocessed: postprocessed(u, xi, out, ws); return;
    }
}

std::vector<double> step_linearized_euler(const SemilinearSystem& system, double h,
                                          std::span<const double> v,
                                          std::span<const double> xi) {
    const Stepper stepper(system, h);
    StepWorkspace ws(system.dim());
    std::vector<double> out(system.dim());
    stepper.euler(v, xi, out, ws);
    return out;
}

std::vector<double> step_trapezoidal(const SemilinearSystem& system, double h,
                                     std::span<const double> u, std::span<const double> xi) {
    const Stepper stepper(system, h);
    StepWorkspace ws(system.dim());
    std::vector<double> out(system.dim());
    stepper.trapezoidal(u, xi, out, ws);
    return out;
}

std::pair<std::vector<double>, std::vector<double>> step_new_spde(const SemilinearSystem& system,
                                                                  double h,
                                                                  std::span<const double> u,
                                                                  std::span<const double> xi) {
    const Stepper stepper(system, h);
    StepWorkspace ws(system.dim());
    std::vector<double> next(system.dim()), bar(system.dim());
    stepper.postprocessed(u, xi, next, ws);
    stepper.postprocess(u, xi, bar, ws);
    return {std::move(next), std::move(bar)};
}

void advance(const Stepper& stepper, Scheme scheme, StepperState& state,
             std::span<const double> xi, StepWorkspace& ws) {
    if (state.u.size() != stepper.dim()) throw ProblemError("state: dimension mismatch");
    if (scheme == Scheme::postprocessed) {
        if (!state.u_bar) state.u_bar.emplace(stepper.dim());
        stepper.postprocess(state.u, xi, *state.u_bar, ws);
    }
    stepper.step(scheme, state.u, xi, state.u, ws);
    state.h = stepper.h();
    ++state.step_index;
}

PathRecorder::PathRecorder(std::ostream& out, std::uint64_t stride)
    : out_(&out), stride_(stride == 0 ? 1 : stride) {}

void PathRecorder::record(std::uint64_t step_index, double t, std::span<const double> state) {
    if (step_index % stride_ != 0) return;
    auto& os = *out_;
    os << step_index << ' ' << t;
    for (double x : state) os << ' ' << x;
    os << '\n';
}

TrajectoryResult run_trajectory(const Stepper& stepper, Scheme scheme, std::uint64_t n_steps,
                                std::uint64_t seed, std::uint64_t trajectory,
                                std::span<const double> u0, PathRecorder* recorder,
                                std::uint32_t substeps) {
    const std::size_t n = stepper.dim();
    if (u0.size() != n) throw ProblemError("initial state: dimension mismatch");
    if (substeps == 0) throw ProblemError("substeps must be >= 1");
    if (n_steps * substeps >= NoiseStream::kPostprocessStep)
        throw ProblemError("too many steps for the noise counter");
    const NoiseStream stream(seed, trajectory);
    const auto& system = stepper.system();
    const auto scale = system.noise_scale();
    StepWorkspace ws(n);
    std::vector<double> u(u0.begin(), u0.end());
    std::vector<double> xi(n), scratch(n), bar(n);
    const bool post = scheme == Scheme::postprocessed;
    const double h = stepper.h();
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        stream.aggregated_normals(static_cast<std::uint32_t>(k * substeps), substeps, xi,
                                  scratch);
        for (std::size_t i = 0; i < n; ++i) xi[i] *= scale[i];
        if (recorder) {
            if (post) {
                stepper.postprocess(u, xi, bar, ws);
                recorder->record(k, static_cast<double>(k) * h, bar);
            } else {
                recorder->record(k, static_cast<double>(k) * h, u);
            }
        }
        stepper.step(scheme, u, xi, u, ws);
    }
    TrajectoryResult result;
    if (post) {
        sample_noise_increment(system, stream, NoiseStream::kPostprocessStep, xi);
        stepper.postprocess(u, xi, bar, ws);
        result.u_bar = bar;
    } else {
        result.u_bar = u;
    }
    if (recorder) recorder->record(n_steps, static_cast<double>(n_steps) * h, result.u_bar);
    result.u = std::move(u);
    return result;
}

TrajectoryResult run_trajectory(const SemilinearSystem& system, Scheme scheme, double h,
                                std::uint64_t n_steps, std::uint64_t seed,
                                std::span<const double> u0, PathRecorder* recorder) {
    const Stepper stepper(system, h);
    return run_trajectory(stepper, scheme, n_steps, seed, 0, u0, recorder);
}

SchemeCoefficients SchemeCoefficients::canonical() {
    const double a1 = (std::sqrt(5.0) - 2.0) / 2.0;
    return {a1, 0.5, -a1, 0.0, 0.0, 0.5};
}

SdeProblem SdeProblem::linear(const Eigen::MatrixXd& a, double sigma) {
    if (a.rows() != a.cols()) throw ProblemError("linear drift matrix must be square");
    SdeProblem p;
    p.dim = static_cast<std::size_t>(a.rows());
    p.f1 = [a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; };
    p.f1_jacobian = [a](const Eigen::VectorXd&) -> Eigen::MatrixXd { return a; };
    p.f2 = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return Eigen::VectorXd::Zero(x.size());
    };
    p.sigma = sigma;
    p.f1_linear = true;
    return p;
}

SdeStepper::SdeStepper(SdeProblem problem, SchemeCoefficients coeffs, double h,
                       NewtonOptions options)
    : problem_(std::move(problem)), coeffs_(coeffs), h_(h), options_(options) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ProblemError("step size must be positive");
    if (!problem_.f1 || !problem_.f1_jacobian || !problem_.f2)
        throw ProblemError("SDE problem needs f1, its Jacobian and f2");
    if (problem_.dim == 0) throw ProblemError("SDE dimension must be positive");
    if (problem_.f1_linear)
        cached_ = factor(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem_.dim)), 0);
}

SdeStepper::Factors SdeStepper::factor(const Eigen::VectorXd& x,
                                       std::uint64_t step_index) const {
    const auto n = static_cast<Eigen::Index>(problem_.dim);
    Factors f;
    f.jac = problem_.f1_jacobian(x);
    if (f.jac.rows() != n || f.jac.cols() != n)
        throw ProblemError("f1 Jacobian has the wrong shape");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd m2 = id - kGamma * h_ * f.jac;
    f.j2.compute(m2);
    const double det = f.j2.determinant();
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw SingularFactor("I - kGamma h f1' is singular at step " +
                             std::to_string(step_index));
    const Eigen::MatrixXd m3 = id - 0.5 * h_ * f.jac;
    if (!m3.isApprox(m3.transpose(), 1e-12))
        throw SingularFactor("I - (h/2) f1' is not symmetric; J3 needs a commuting setting");
    Eigen::LLT<Eigen::MatrixXd> llt(m3);
    if (llt.info() != Eigen::Success)
        throw SingularFactor("I - (h/2) f1' is not positive definite at step " +
                             std::to_string(step_index));
    f.j3_upper = llt.matrixU();
    return f;
}

Eigen::VectorXd SdeStepper::solve_implicit(const Eigen::VectorXd& guess, double coef,
                                           const Eigen::VectorXd& offset,
                                           const Eigen::VectorXd& rhs, std::uint64_t step_index,
                                           int& iterations) const {
    const auto n = guess.size();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    auto residual = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return y - coef * h_ * problem_.f1(y + offset) - rhs;
    };
    Eigen::VectorXd y = guess;
    Eigen::VectorXd g = residual(y);
    double gnorm = g.norm();
    for (iterations = 0; iterations < options_.max_iterations; ++iterations) {
        if (gnorm <= options_.tolerance * std::max(1.0, y.norm())) return y;
        const Eigen::MatrixXd jac = id - coef * h_ * problem_.f1_jacobian(y + offset);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        const double det = lu.determinant();
        if (!(std::abs(det) > 0.0) || !std::isfinite(det))
            throw SingularFactor("Newton Jacobian is singular at step " +
                                 std::to_string(step_index));
        const Eigen::VectorXd delta = lu.solve(g);
        double damping = 1.0;
        Eigen::VectorXd trial = y - delta;
        Eigen::VectorXd gtrial = residual(trial);
        while (!(gtrial.norm() < gnorm) && damping > 1e-6) {
            damping *= 0.5;
            trial = y - damping * delta;
            gtrial = residual(trial);
        }
        if (!std::isfinite(gtrial.norm())) break;
        y = std::move(trial);
        g = std::move(gtrial);
        gnorm = g.norm();
    }
    if (gnorm <= options_.tolerance * std::max(1.0, y.norm())) return y;
    throw NewtonFailure("Newton iteration did not converge", step_index);
}

SdeStepResult SdeStepper::step(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                               std::uint64_t step_index) const {
    const auto n = static_cast<Eigen::Index>(problem_.dim);
    if (x.size() != n || xi.size() != n) throw ProblemError("SDE step: dimension mismatch");
    const Factors local = cached_ ? Factors{} : factor(x, step_index);
    const Factors& f = cached_ ? *cached_ : local;

    const double c1 = kGamma - coeffs_.a3;
    const double c2 = 1.0 - c1;
    const Eigen::VectorXd w = problem_.sigma * std::sqrt(h_) * xi;
    const Eigen::VectorXd j2w = f.j2.solve(w);
    const Eigen::VectorXd j1inv_j2w = j2w - h_ * (f.jac * j2w);
    const Eigen::VectorXd rhs =
        x + h_ * problem_.f2(x + coeffs_.a2 * j2w) + c1 * j1inv_j2w + c2 * j2w;

    SdeStepResult result;
    result.x_next = solve_implicit(x, 1.0, coeffs_.a1 * j2w, rhs, step_index,
                                   result.newton_iterations);

    const Eigen::VectorXd j3w = f.j3_upper.triangularView<Eigen::Upper>().solve(w);
    const Eigen::VectorXd bar_rhs = x + coeffs_.b2 * h_ * problem_.f2(x) + coeffs_.c * j3w;
    if (coeffs_.b1 == 0.0) {
        result.x_bar = bar_rhs;
    } else {
        int iters = 0;
        result.x_bar = solve_implicit(x, coeffs_.b1, Eigen::VectorXd::Zero(n), bar_rhs,
                                      step_index, iters);
    }
    return result;
}

SdeStepResult step_new_sde(const SdeProblem& problem, const SchemeCoefficients& coeffs, double h,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                           std::uint64_t step_index) {
    return SdeStepper(problem, coeffs, h).step(x, xi, step_index);
}

}  // namespace ppimex
