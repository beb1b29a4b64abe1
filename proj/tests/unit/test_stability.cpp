#include "ppimex/montecarlo.hpp"
#include "ppimex/stability.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace ppimex;

namespace {

std::vector<double> neg_log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = -std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) *
                                                   static_cast<double>(i) /
                                                   static_cast<double>(n - 1));
    return z;
}

}  // namespace

TEST_CASE("moment ratios of the baselines") {
    CHECK(*moment_ratio(Method::euler, -2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*moment_ratio(Method::euler, -1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    for (double z : {-1e-6, -0.3, -1.0, -7.5, -1e3, -1e6})
        CHECK(*moment_ratio(Method::trapezoidal, z) == doctest::Approx(1.0).epsilon(1e-12));
    for (double z : {-0.1, -1.0, -10.0})
        CHECK(*postprocessed_moment_ratio(Method::euler, z) == *moment_ratio(Method::euler, z));
}

TEST_CASE("postprocessed ratio is one on the exactness lines") {
    for (double z : neg_log_grid(1e-6, 1e6, 1000))
        CHECK(std::abs(*postprocessed_moment_ratio(Method::new_method, z, 0.0) - 1.0) <= 1e-10);
    CHECK(postprocessed_moment_ratio_closed_form(0.0, 0.5) == 1.0);
    CHECK(postprocessed_moment_ratio_closed_form(0.0, -0.5) == 1.0);
    CHECK(*postprocessed_moment_ratio(Method::new_method, 0.0, -0.5) ==
          doctest::Approx(1.0).epsilon(1e-15));
    for (double beta = -0.95; beta < 0.0; beta += 0.05)
        CHECK(std::abs(*postprocessed_moment_ratio(Method::new_method, 0.0, beta) - 1.0) <= 1e-10);
}

TEST_CASE("unstable pairs give no stationary ratio") {
    // A(0, 0.5) = 1.5 for the new scheme.
    CHECK_FALSE(moment_ratio(Method::new_method, 0.0, 0.5).has_value());
    CHECK_FALSE(postprocessed_moment_ratio(Method::new_method, 0.0, 0.5).has_value());
    CHECK_FALSE(moment_ratio(Method::euler, 0.0, 0.0).has_value());
    CHECK_THROWS_AS((void)moment_ratio(Method::euler, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)moment_ratio(Method::euler, std::nan("")), std::invalid_argument);
}

TEST_CASE("definition and closed form of the postprocessed ratio agree") {
    CHECK(*postprocessed_moment_ratio(Method::new_method, -1.0, 0.3) ==
          doctest::Approx(postprocessed_moment_ratio_closed_form(-1.0, 0.3)).epsilon(1e-12));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> e(-3.0, 3.0), u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double z = -std::pow(10.0, e(rng));
        const double hi = std::min(1.0, std::abs(z));
        const double beta = -1.0 + (hi + 1.0) * u(rng);
        if (!(beta > -1.0 && beta < hi)) continue;
        const auto def = postprocessed_moment_ratio(Method::new_method, z, beta);
        REQUIRE(def.has_value());
        CHECK(std::abs(*def - postprocessed_moment_ratio_closed_form(z, beta)) <= 1e-12);
    }
}

TEST_CASE("error bound holds on the reference grid") {
    const auto z = neg_log_grid(1e-3, 1e3, 100);
    std::vector<double> beta;
    for (double b : neg_log_grid(0.01, 0.99, 50)) {
        beta.push_back(b);
        beta.push_back(-b);
    }
    const auto r = check_postprocessed_error_bound(z, beta);
    CHECK(r.holds());
    CHECK(r.max_ratio > 0.0);
    CHECK(r.evaluated + r.skipped == z.size() * beta.size());
}

TEST_CASE("error bound ratio on the exactness lines is zero") {
    const auto r = check_postprocessed_error_bound(std::vector<double>{0.0}, std::vector<double>{0.0});
    CHECK(r.max_ratio == 0.0);
    CHECK(r.evaluated == 1);
    const auto line = check_postprocessed_error_bound(std::vector<double>{-2.0, -5.0},
                                                      std::vector<double>{0.0});
    CHECK(line.max_ratio == 0.0);
    CHECK(postprocessed_error_bound(0.0, 0.4) == 0.0);
    CHECK(postprocessed_moment_defect(0.0, 0.4) == 0.0);
    CHECK(postprocessed_moment_defect(-3.0, 0.0) == 0.0);
}

TEST_CASE("error bound ratio stays below one near the origin") {
    for (double z : {-1e-4, -1e-6, -1e-8}) {
        for (double beta : {-1e-3, -1e-9, 1e-9, 0.5e-8}) {
            if (!(beta < std::abs(z))) continue;
            const double ratio =
                std::abs(postprocessed_moment_defect(z, beta)) / postprocessed_error_bound(z, beta);
            CHECK(ratio > 0.0);
            CHECK(ratio <= 1.0);
        }
    }
}

TEST_CASE("L-stability classification") {
    CHECK(l_stability_verdict(Method::euler) == StabilityClass::L_stable);
    CHECK(l_stability_verdict(Method::new_method) == StabilityClass::L_stable);
    CHECK(l_stability_verdict(Method::trapezoidal) == StabilityClass::A_stable_only);
}

TEST_CASE("stationary variances of simulated scalar chains") {
    const auto sys = SemilinearSystem::diagonal({1.0}, {1.0}, {}, 1.0);
    for (double h : {0.1, 0.5, 1.0}) {
        const auto est = time_average(sys, Scheme::postprocessed, h, 1000000, 1000, 3,
                                      Functional::second_moment);
        // The second-moment functional is |u|^2 for diagonal systems.
        CHECK(std::abs(est.mean - 0.5 * *postprocessed_moment_ratio(Method::new_method, -h)) <
              3.0 * est.std_error);
    }
    const auto eu = time_average(sys, Scheme::linearized_euler, 1.0, 1000000, 1000, 3,
                                 Functional::second_moment);
    CHECK(std::abs(eu.mean - 1.0 / 3.0) < 3.0 * eu.std_error);
}

TEST_CASE("method names round-trip") {
    for (auto m : {Method::euler, Method::trapezoidal, Method::new_method})
        CHECK(parse_method(method_name(m)) == m);
    CHECK_THROWS(parse_method("heun"));
}
