#include "ppimex/integrators.hpp"
#include "ppimex/stability.hpp"
#include "ppimex/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

using namespace ppimex;

namespace {

SemilinearSystem scalar(double lambda, double sigma, Nonlinearity f = {}) {
    return SemilinearSystem::diagonal({lambda}, {1.0}, std::move(f), sigma);
}

std::vector<double> v1(double x) { return {x}; }

Eigen::VectorXd e1(double x) { return Eigen::VectorXd::Constant(1, x); }

SdeProblem scalar_sde(double a, double sigma, std::function<double(double)> f2) {
    auto p = SdeProblem::linear(Eigen::MatrixXd::Constant(1, 1, a), sigma);
    if (f2)
        p.f2 = [f2](const Eigen::VectorXd& x) -> Eigen::VectorXd { return e1(f2(x(0))); };
    return p;
}

double sine_drift(double x) { return -x - std::sin(x); }

double euclid_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("linearized Euler scalar steps") {
    CHECK(step_linearized_euler(scalar(1.0, 0.0), 1.0, v1(1.0), v1(0.0))[0] == doctest::Approx(0.5));
    CHECK(step_linearized_euler(scalar(1.0, 1.0), 1.0, v1(0.0), v1(1.0))[0] == doctest::Approx(0.5));
    CHECK(step_linearized_euler(scalar(0.0, 0.0, Nonlinearity::linear(1.0)), 0.5, v1(1.0),
                                v1(0.0))[0] == doctest::Approx(0.5));
}

TEST_CASE("trapezoidal scalar steps") {
    CHECK(step_trapezoidal(scalar(1.0, 0.0), 1.0, v1(1.0), v1(0.0))[0] ==
          doctest::Approx(1.0 / 3.0));
    CHECK(step_trapezoidal(scalar(1.0, 1.0), 1.0, v1(0.0), v1(1.0))[0] ==
          doctest::Approx(2.0 / 3.0));
    const double a = RationalStability{Method::trapezoidal}.A(-1e6);
    CHECK(std::abs(std::abs(a) - 1.0) < 1e-5);
}

TEST_CASE("postprocessed scheme scalar steps") {
    const auto [u1, ubar0] = step_new_spde(scalar(1.0, 1.0), 1.0, v1(0.0), v1(1.0));
    CHECK(u1[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ubar0[0] == doctest::Approx(0.5 / std::sqrt(1.5)).epsilon(1e-15));
    // Algebraic reduction of the noise coefficient to B(-1, 0) = 1/2.
    const double s2 = std::numbers::sqrt2;
    CHECK(((s2 - 1.0) / 4.0 + (3.0 - s2) / 2.0) * 2.0 / (5.0 - s2) ==
          doctest::Approx(0.5).epsilon(1e-15));

    const Stepper st(scalar(1.0, 1.0), 1.0);
    StepWorkspace ws(1);
    std::vector<double> bar(1);
    st.postprocess(v1(0.5), v1(1.0), bar, ws);
    CHECK(bar[0] == doctest::Approx(0.5 + 0.5 / std::sqrt(1.5)).epsilon(1e-15));
    CHECK(bar[0] == doctest::Approx(0.908248).epsilon(1e-6));
}

TEST_CASE("without drift and noise the new step equals linearized Euler") {
    const auto sys = SemilinearSystem::dirichlet_grid(15, {}, 0.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    std::vector<double> u(15), xi(15);
    for (auto& x : u) x = d(rng);
    for (auto& x : xi) x = d(rng);
    const auto eu = step_linearized_euler(sys, 0.01, u, xi);
    const auto nw = step_new_spde(sys, 0.01, u, xi).first;
    for (std::size_t i = 0; i < 15; ++i) CHECK(nw[i] == doctest::Approx(eu[i]).epsilon(1e-14));
}

TEST_CASE("one-step moments of the new scheme match the stability functions") {
    const double lambda = 2.0, h = 0.25, sigma = 1.0, x = 1.0;
    const Stepper st(scalar(lambda, sigma), h);
    StepWorkspace ws(1);
    const NoiseStream stream(9, 0);
    RunningStats m, v;
    std::vector<double> xi(1), out(1);
    for (std::uint32_t k = 0; k < 100000; ++k) {
        stream.standard_normals(k, xi);
        st.postprocessed(v1(x), xi, out, ws);
        m.add(out[0]);
        v.add(out[0] * out[0]);
    }
    const RationalStability s{Method::new_method};
    const double z = -lambda * h;
    const double mean = s.A(z) * x;
    const double var = sigma * sigma * h * s.B(z) * s.B(z);
    CHECK(std::abs(m.mean() - mean) < 3.0 * m.stderr_of_mean());
    CHECK(std::abs(v.mean() - (var + mean * mean)) < 3.0 * v.stderr_of_mean());
}

TEST_CASE("SDE form reduces to the scalar cases") {
    const auto canon = SchemeCoefficients::canonical();
    // Linear implicit part.
    const auto r = step_new_sde(scalar_sde(-1.0, 1.0, {}), canon, 1.0, e1(0.0), e1(1.0));
    CHECK(r.x_next(0) == doctest::Approx(0.5).epsilon(1e-14));

    // Explicit part only.
    const double h = 0.3, sigma = 0.7, x = 0.4, xi = -1.1;
    const auto e = step_new_sde(scalar_sde(0.0, sigma, sine_drift), canon, h, e1(x), e1(xi));
    const double w = sigma * std::sqrt(h) * xi;
    CHECK(e.x_next(0) == doctest::Approx(x + h * sine_drift(x + 0.5 * w) + w).epsilon(1e-14));

    // Pure random walk.
    const auto rw = step_new_sde(scalar_sde(0.0, 1.0, {}), canon, h, e1(x), e1(xi));
    CHECK(rw.x_next(0) == doctest::Approx(x + std::sqrt(h) * xi).epsilon(1e-14));
    CHECK(rw.x_bar(0) == doctest::Approx(x + 0.5 * std::sqrt(h) * xi).epsilon(1e-14));
}

TEST_CASE("SDE form with linear f1 equals the semilinear step") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> d;
    std::uniform_real_distribution<double> lam(0.5, 50.0);
    const auto canon = SchemeCoefficients::canonical();
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3;
        std::vector<double> lambda(n), u(n), xi(n);
        for (auto& l : lambda) l = lam(rng);
        std::sort(lambda.begin(), lambda.end());
        for (auto& x : u) x = d(rng);
        for (auto& x : xi) x = d(rng);
        const double h = std::ldexp(1.0, -static_cast<int>(trial % 6));
        const double sigma = 0.8;
        const auto sys =
            SemilinearSystem::diagonal(lambda, std::vector<double>(n, 1.0), Nonlinearity::sine(), sigma);
        const auto [next, bar] = step_new_spde(sys, h, u, xi);

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) a(i, i) = -lambda[i];
        auto p = SdeProblem::linear(a, sigma);
        p.f2 = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return x.unaryExpr([](double y) { return sine_drift(y); });
        };
        const auto r = step_new_sde(p, canon, h,
                                    Eigen::Map<const Eigen::VectorXd>(u.data(), n),
                                    Eigen::Map<const Eigen::VectorXd>(xi.data(), n));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(r.x_next(static_cast<Eigen::Index>(i)) - next[i]) <= 1e-12);
            CHECK(std::abs(r.x_bar(static_cast<Eigen::Index>(i)) - bar[i]) <= 1e-12);
        }
    }
}

TEST_CASE("SDE step with nonlinear implicit part solves its stage equation") {
    SdeProblem p;
    p.dim = 1;
    p.sigma = 1.0;
    p.f1 = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return e1(-2.0 * x(0) - x(0) * x(0) * x(0)); };
    p.f1_jacobian = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        return Eigen::MatrixXd::Constant(1, 1, -2.0 - 3.0 * x(0) * x(0));
    };
    p.f2 = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return e1(-std::sin(x(0))); };
    const auto k = SchemeCoefficients::canonical();
    const double h = 0.5, x = 1.3, xi = 0.4;
    const auto r = step_new_sde(p, k, h, e1(x), e1(xi));
    CHECK(r.newton_iterations > 0);
    // Rebuild the stage equation with the Jacobian frozen at x.
    const double jac = -2.0 - 3.0 * x * x;
    const double w = std::sqrt(h) * xi;
    const double j2w = w / (1.0 - kGamma * h * jac);
    const double c1 = kGamma - k.a3;
    const double rhs = x + h * -std::sin(x + k.a2 * j2w) + c1 * (j2w - h * jac * j2w) +
                       (1.0 - c1) * j2w;
    const double y = r.x_next(0);
    const double g = y + h * (2.0 * (y + k.a1 * j2w) + std::pow(y + k.a1 * j2w, 3)) - rhs;
    CHECK(std::abs(g) < 1e-11);
}

TEST_CASE("SDE step failures are reported") {
    auto p = SdeProblem::linear(Eigen::MatrixXd::Constant(1, 1, 10.0), 1.0);
    CHECK_THROWS_AS(SdeStepper(p, SchemeCoefficients::canonical(), 1.0), SingularFactor);

    // y - h exp(y + offset) = rhs has no real root for h = 1, rhs = 0.5, offset = 0.
    SdeProblem bad;
    bad.dim = 1;
    bad.sigma = 0.0;
    bad.f1 = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array().exp(); };
    bad.f1_jacobian = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        return Eigen::MatrixXd::Constant(1, 1, std::exp(x(0)));
    };
    bad.f2 = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.0 * x; };
    try {
        (void)step_new_sde(bad, SchemeCoefficients::canonical(), 1.0, e1(0.5), e1(0.0), 17);
        FAIL("expected a Newton failure");
    } catch (const NewtonFailure& e) {
        CHECK(e.step_index() == 17);
    }
}

TEST_CASE("deterministic Euler trajectories decay geometrically") {
    SpectralProblem p = SpectralProblem::white_noise_heat(4);
    p.sigma = 0.0;
    const auto sys = p.system();
    const std::vector<double> u0{1.0, -2.0, 0.5, 3.0};
    const double h = 0.01;
    const auto r = run_trajectory(sys, Scheme::linearized_euler, h, 25, 1, u0);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(r.u[i] == doctest::Approx(std::pow(1.0 + p.lambda[i] * h, -25.0) * u0[i]).epsilon(1e-13));
}

TEST_CASE("zero steps return the initial state") {
    const auto sys = SemilinearSystem::dirichlet_grid(5, Nonlinearity::sine(), 1.0);
    const std::vector<double> u0{0.1, 0.2, 0.3, 0.4, 0.5};
    for (auto s : {Scheme::linearized_euler, Scheme::trapezoidal, Scheme::postprocessed})
        CHECK(run_trajectory(sys, s, 0.1, 0, 3, u0).u == u0);
}

TEST_CASE("Euler and new scheme are centred under the same seeds") {
    const auto sys = scalar(1.0, 1.0);
    const Stepper st(sys, 0.25);
    RunningStats eu, nw;
    const std::vector<double> u0{0.0};
    for (std::uint64_t k = 0; k < 10000; ++k) {
        eu.add(run_trajectory(st, Scheme::linearized_euler, 8, 5, k, u0).u[0]);
        nw.add(run_trajectory(st, Scheme::postprocessed, 8, 5, k, u0).u[0]);
    }
    CHECK(std::abs(eu.mean()) < 3.0 * eu.stderr_of_mean());
    CHECK(std::abs(nw.mean()) < 3.0 * nw.stderr_of_mean());
    // Same noise, different maps.
    CHECK(run_trajectory(st, Scheme::linearized_euler, 8, 5, 0, u0).u !=
          run_trajectory(st, Scheme::postprocessed, 8, 5, 0, u0).u);
}

TEST_CASE("coarse trajectories use aggregated fine increments") {
    const auto sys = SemilinearSystem::dirichlet_grid(6, Nonlinearity::sine(), 1.0);
    const double h = 1.0 / 16.0;
    const std::uint32_t sub = 4;
    const Stepper st(sys, h);
    const std::vector<double> u0(6, 0.25);
    const auto r = run_trajectory(st, Scheme::postprocessed, 5, 21, 3, u0, nullptr, sub);

    const NoiseStream stream(21, 3);
    StepWorkspace ws(6);
    std::vector<double> u = u0, xi(6), scratch(6), bar(6);
    for (std::uint32_t k = 0; k < 5; ++k) {
        stream.aggregated_normals(k * sub, sub, xi, scratch);
        for (std::size_t i = 0; i < 6; ++i) xi[i] *= sys.noise_scale()[i];
        st.postprocessed(u, xi, u, ws);
    }
    sample_noise_increment(sys, stream, NoiseStream::kPostprocessStep, xi);
    st.postprocess(u, xi, bar, ws);
    CHECK(r.u == u);
    CHECK(r.u_bar == bar);
}

TEST_CASE("path recorder writes strided rows") {
    const auto sys = scalar(1.0, 0.0);
    std::ostringstream os;
    PathRecorder rec(os, 2);
    (void)run_trajectory(sys, Scheme::linearized_euler, 0.5, 4, 1, v1(1.0), &rec);
    std::istringstream in(os.str());
    std::vector<std::pair<int, double>> rows;
    int step = 0;
    double t = 0.0, x = 0.0;
    while (in >> step >> t >> x) rows.emplace_back(step, x);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].first == 0);
    CHECK(rows[1].first == 2);
    CHECK(rows[2].first == 4);
    CHECK(rows[2].second == doctest::Approx(std::pow(1.5, -4.0)));
}

TEST_CASE("new scheme contracts pathwise under common noise") {
    const std::size_t n = 31;
    const auto sys = SemilinearSystem::dirichlet_grid(n, Nonlinearity::sine(), 1.0);
    const double lambda1 = sys.lambda()[0];
    const double L = sys.nonlinearity().lipschitz();
    std::mt19937_64 rng(13);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 50; ++trial) {
        const double h = std::ldexp(1.0, -static_cast<int>(1 + trial % 8));
        const Stepper st(sys, h);
        StepWorkspace ws(n);
        const double factor = (1.0 + L * h) / (1.0 + lambda1 * h);
        std::vector<double> a(n), b(n), xi(n), abar(n), bbar(n);
        for (auto& x : a) x = 3.0 * d(rng);
        for (auto& x : b) x = 3.0 * d(rng);
        const double d0 = euclid_distance(a, b);
        const NoiseStream stream(static_cast<std::uint64_t>(trial), 0);
        double bound = d0;
        for (std::uint32_t k = 0; k < 40; ++k) {
            sample_noise_increment(sys, stream, k, xi);
            st.postprocess(a, xi, abar, ws);
            st.postprocess(b, xi, bbar, ws);
            CHECK(euclid_distance(abar, bbar) ==
                  doctest::Approx(euclid_distance(a, b)).epsilon(1e-12));
            st.postprocessed(a, xi, a, ws);
            st.postprocessed(b, xi, b, ws);
            bound *= factor;
            CHECK(euclid_distance(a, b) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("moments stay bounded on a stiff spectral problem") {
    auto p = SpectralProblem::white_noise_heat(64);
    p.nonlinearity = Nonlinearity::sine();
    const auto sys = p.system();
    for (double h : {1.0, 0.5, 0.25, 0.125}) {
        const Stepper st(sys, h);
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const std::vector<double> u0(64, 1.0);
            StepperState state{u0, std::nullopt, 0, h};
            StepWorkspace ws(64);
            const NoiseStream stream(seed, 0);
            std::vector<double> xi(64);
            for (std::uint32_t k = 0; k < 1000; ++k) {
                sample_noise_increment(sys, stream, k, xi);
                advance(st, Scheme::postprocessed, state, xi, ws);
                double norm = 0.0;
                for (double x : state.u) norm += x * x;
                worst = std::max(worst, std::sqrt(norm));
            }
        }
        CHECK(std::isfinite(worst));
        CHECK(worst < 20.0);
    }
}

TEST_CASE("scheme names round-trip") {
    for (auto s : {Scheme::linearized_euler, Scheme::trapezoidal, Scheme::postprocessed})
        CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK(parse_scheme("new") == Scheme::postprocessed);
    CHECK_THROWS(parse_scheme("rk4"));
}
