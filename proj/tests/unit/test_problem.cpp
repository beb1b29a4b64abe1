#include "ppimex/nonlinearity.hpp"
#include "ppimex/problem.hpp"
#include "ppimex/stats.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace ppimex;

namespace {

SpectralProblem heat(std::size_t n) { return SpectralProblem::white_noise_heat(n); }

std::vector<double> empirical_variances(const SemilinearSystem& system, std::uint32_t draws) {
    const NoiseStream stream(42, 0);
    std::vector<RunningStats> stats(system.dim());
    std::vector<double> x(system.dim());
    for (std::uint32_t k = 0; k < draws; ++k) {
        sample_noise_increment(system, stream, k, x);
        for (std::size_t i = 0; i < x.size(); ++i) stats[i].add(x[i] * x[i]);
    }
    std::vector<double> out;
    for (const auto& s : stats) out.push_back(s.mean());
    return out;
}

}  // namespace

TEST_CASE("grid eigenvalues match a dense eigensolver") {
    const std::size_t n = 7;
    const double dx = 1.0 / static_cast<double>(n + 1);
    Eigen::MatrixXd minus_a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        minus_a(i, i) = 2.0 / (dx * dx);
        if (i + 1 < n) minus_a(i, i + 1) = minus_a(i + 1, i) = -1.0 / (dx * dx);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(minus_a);
    const auto lam = GridProblem::make(n).eigenvalues();
    REQUIRE(lam.size() == n);
    for (std::size_t p = 0; p < n; ++p) {
        CHECK(lam[p] == doctest::Approx(es.eigenvalues()(static_cast<Eigen::Index>(p))).epsilon(1e-12));
        CHECK(lam[p] == doctest::Approx((2.0 / (dx * dx)) *
                                        (1.0 - std::cos(static_cast<double>(p + 1) *
                                                        std::numbers::pi * dx)))
                            .epsilon(1e-14));
    }
}

TEST_CASE("grid operator has the second-difference stencil") {
    const auto sys = SemilinearSystem::dirichlet_grid(3, {}, 1.0);
    CHECK(sys.dx() == 0.25);
    std::vector<double> e(3), out(3);
    for (std::size_t j = 0; j < 3; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        sys.apply_operator(e, out);
        for (std::size_t i = 0; i < 3; ++i) {
            const double want = i == j ? -32.0 : (i + 1 == j || j + 1 == i) ? 16.0 : 0.0;
            CHECK(out[i] == doctest::Approx(want));
        }
    }
    for (double s : sys.noise_scale()) CHECK(s == doctest::Approx(2.0));
}

TEST_CASE("spectral problem validation") {
    auto p = heat(4);
    CHECK_NOTHROW(p.validate());

    auto bad = p;
    bad.lambda[0] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ProblemError);

    bad = p;
    std::swap(bad.lambda[1], bad.lambda[2]);
    CHECK_THROWS_AS(bad.validate(), ProblemError);

    bad = p;
    bad.q[3] = -1.0;
    CHECK_THROWS_AS(bad.validate(), ProblemError);

    bad = p;
    bad.b = std::vector<double>(4, p.lambda[0]);
    CHECK_THROWS_AS(bad.validate(), ProblemError);

    bad = p;
    bad.b = std::vector<double>(4, 0.5 * p.lambda[0]);
    CHECK_NOTHROW(bad.validate());
    bad.nonlinearity = Nonlinearity::linear(1.0);
    CHECK_THROWS_AS(bad.validate(), ProblemError);

    bad = p;
    bad.nonlinearity = Nonlinearity::linear(2.0 * p.lambda[0]);
    CHECK_THROWS_AS(bad.validate(), ProblemError);
    bad.nonlinearity = Nonlinearity::sine();
    CHECK_NOTHROW(bad.validate());
    bad.nonlinearity = Nonlinearity::cubic();
    CHECK_THROWS_AS(bad.validate(), ProblemError);
}

TEST_CASE("heat spectrum is p^2 pi^2 with unit noise") {
    const auto p = heat(5);
    CHECK(dirichlet_1d_eigenvalues(5) == p.lambda);
    for (std::size_t i = 0; i < 5; ++i) {
        const double k = static_cast<double>(i + 1) * std::numbers::pi;
        CHECK(p.lambda[i] == doctest::Approx(k * k).epsilon(1e-15));
        CHECK(p.q[i] == 1.0);
    }
}

TEST_CASE("zero noise covariance gives a zero increment") {
    SpectralProblem p;
    p.lambda = {1.0, 2.0, 3.0};
    p.q = {0.0, 0.0, 0.0};
    const auto sys = p.system();
    std::vector<double> x(3, 9.0);
    sample_noise_increment(sys, NoiseStream(1, 0), 0, x);
    for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("spectral noise increments have variance q") {
    SpectralProblem p;
    p.lambda = {1.0, 4.0};
    p.q = {1.0, 1.0};
    const auto var = empirical_variances(p.system(), 100000);
    // Var(xi^2) = 2, so the standard error of the second moment is sqrt(2/n).
    const double se = std::sqrt(2.0 / 1e5);
    for (double v : var) CHECK(std::abs(v - 1.0) < 3.0 * se);
}

TEST_CASE("grid noise increments have variance 1/dx") {
    const auto sys = GridProblem::make(3).system();
    const auto var = empirical_variances(sys, 100000);
    const double se = 4.0 * std::sqrt(2.0 / 1e5);
    for (double v : var) CHECK(std::abs(v - 4.0) < 3.0 * se);
}

TEST_CASE("trace-convergence verdicts for the heat spectrum") {
    const auto p = heat(200000);
    const std::vector<std::size_t> levels{50000, 100000, 200000};
    const std::vector<double> s{0.25, 0.75};
    const auto d = estimate_s_bar(p, s, levels);
    REQUIRE(d.entries.size() == 2);
    CHECK(d.entries[0].convergent);
    CHECK_FALSE(d.entries[1].convergent);
    CHECK(d.s_bar == 0.25);
    CHECK(d.entries[0].partial_traces.size() == 3);
}

TEST_CASE("trace-class noise converges for every s below one") {
    auto p = heat(4096);
    for (std::size_t i = 0; i < p.q.size(); ++i) p.q[i] = std::ldexp(1.0, -static_cast<int>(i + 1));
    const std::vector<std::size_t> levels{1024, 2048, 4096};
    const std::vector<double> s{0.1, 0.5, 0.9, 0.99};
    const auto d = estimate_s_bar(p, s, levels);
    for (const auto& e : d.entries) CHECK(e.convergent);
    CHECK(d.s_bar == 0.99);
}

TEST_CASE("trace diagnostics reject bad truncations") {
    const auto p = heat(10);
    const std::vector<double> s{0.5};
    const std::vector<std::size_t> too_big{5, 20};
    const std::vector<std::size_t> decreasing{8, 4};
    const std::vector<std::size_t> single{8};
    CHECK_THROWS_AS(estimate_s_bar(p, s, too_big), ProblemError);
    CHECK_THROWS_AS(estimate_s_bar(p, s, decreasing), ProblemError);
    CHECK_THROWS_AS(estimate_s_bar(p, s, single), ProblemError);
}

TEST_CASE("nonlinearities and their Lipschitz constants") {
    const auto lin = Nonlinearity::parse("linear:2.5");
    CHECK(lin(2.0) == -5.0);
    CHECK(lin.derivative(7.0) == -2.5);
    CHECK(lin.lipschitz() == 2.5);

    const auto s = Nonlinearity::parse("sin");
    CHECK(s(1.0) == doctest::Approx(-1.0 - std::sin(1.0)));
    CHECK(s.derivative(0.0) == -2.0);
    CHECK(s.lipschitz() == 2.0);

    const auto c = Nonlinearity::parse("cubic");
    CHECK(c(1.0) == -3.0);
    CHECK(std::isinf(c.lipschitz()));

    CHECK(Nonlinearity::parse("none").is_zero());
    CHECK_THROWS(Nonlinearity::parse("tanh"));
    CHECK_THROWS(Nonlinearity::parse("linear:x"));
}

TEST_CASE("diagonal drift applies the nonlinearity componentwise") {
    const auto sys = SemilinearSystem::diagonal({1.0, 2.0}, {1.0, 1.0}, Nonlinearity::sine(), 1.0);
    const std::vector<double> u{0.5, -1.0};
    std::vector<double> f(2);
    sys.drift(u, f);
    CHECK(f[0] == doctest::Approx(-0.5 - std::sin(0.5)));
    CHECK(f[1] == doctest::Approx(1.0 + std::sin(1.0)));
    const auto lin = SemilinearSystem::diagonal({1.0, 2.0}, {1.0, 1.0}, {}, 1.0,
                                                std::vector<double>{0.25, 0.5});
    lin.drift(u, f);
    CHECK(f[0] == -0.125);
    CHECK(f[1] == 0.5);
}
