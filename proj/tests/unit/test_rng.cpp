#include "ppimex/rng.hpp"
#include "ppimex/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ppimex;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using P = Philox4x32;
    CHECK(P::apply({0, 0, 0, 0}, {0, 0}) ==
          P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(P::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                   {0xffffffffu, 0xffffffffu}) ==
          P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(P::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                   {0xa4093822u, 0x299f31d0u}) ==
          P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("noise streams are pure functions of their coordinates") {
    const NoiseStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::vector<double> x(5), y(5), z(5), w(5);
    a.standard_normals(11, x);
    b.standard_normals(11, y);
    c.standard_normals(11, z);
    d.standard_normals(11, w);
    CHECK(x == y);
    CHECK(x != z);
    CHECK(x != w);
    // A prefix request reproduces the leading components.
    std::vector<double> shorter(3);
    a.standard_normals(11, shorter);
    for (std::size_t i = 0; i < 3; ++i) CHECK(shorter[i] == x[i]);
}

TEST_CASE("standard normals have unit variance and zero mean") {
    const NoiseStream s(1, 0);
    RunningStats m, v, k4;
    std::vector<double> x(4);
    for (std::uint32_t step = 0; step < 50000; ++step) {
        s.standard_normals(step, x);
        for (double xi : x) {
            m.add(xi);
            v.add(xi * xi);
            k4.add(xi * xi * xi * xi);
        }
    }
    CHECK(std::abs(m.mean()) < 4.0 * m.stderr_of_mean());
    CHECK(std::abs(v.mean() - 1.0) < 4.0 * v.stderr_of_mean());
    CHECK(std::abs(k4.mean() - 3.0) < 4.0 * k4.stderr_of_mean());
}

TEST_CASE("aggregated normals are normalised sums of fine draws") {
    const NoiseStream s(5, 2);
    std::vector<double> out(3), scratch(3), fine(3), sum(3, 0.0);
    s.aggregated_normals(8, 1, out, scratch);
    s.standard_normals(8, fine);
    CHECK(out == fine);

    s.aggregated_normals(8, 4, out, scratch);
    for (std::uint32_t j = 0; j < 4; ++j) {
        s.standard_normals(8 + j, fine);
        for (std::size_t i = 0; i < 3; ++i) sum[i] += fine[i];
    }
    for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(sum[i] / 2.0).epsilon(1e-15));
}
