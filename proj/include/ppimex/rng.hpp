#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>

namespace ppimex {

/// Philox4x32-10 block cipher used as a counter-based generator.
///
/// Each output block is a pure function of (counter, key), so any draw can be
/// regenerated from its coordinates without replaying the stream.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Deterministic standard-normal draws keyed by (seed, trajectory, step, mode).
///
/// Components are produced two at a time by Box-Muller from one Philox block.
class NoiseStream {
public:
    /// Step index reserved for the end-of-trajectory postprocessor draw. It is
    /// shared by every step size so that coupled runs see the same variate.
    static constexpr std::uint32_t kPostprocessStep = 0xFFFFFFFFu;

    constexpr NoiseStream(std::uint64_t seed, std::uint64_t trajectory) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trajectory_(trajectory) {}

    std::uint64_t trajectory() const noexcept { return trajectory_; }

    /// Fills `out` with independent N(0,1) variates for the given step.
    void standard_normals(std::uint32_t step, std::span<double> out) const noexcept {
        const std::size_t n = out.size();
        for (std::size_t pair = 0; 2 * pair < n; ++pair) {
            const auto block = Philox4x32::apply(
                {static_cast<std::uint32_t>(pair), step,
                 static_cast<std::uint32_t>(trajectory_),
                 static_cast<std::uint32_t>(trajectory_ >> 32)},
                key_);
            const double u1 = to_open_unit(block[0], block[1]);
            const double u2 = to_open_unit(block[2], block[3]);
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * std::numbers::pi * u2;
            out[2 * pair] = r * std::cos(angle);
            if (2 * pair + 1 < n) out[2 * pair + 1] = r * std::sin(angle);
        }
    }

    /// Brownian increment over `substeps` consecutive fine steps starting at
    /// fine index `first`, normalised to unit variance per component.
    void aggregated_normals(std::uint32_t first, std::uint32_t substeps,
                            std::span<double> out, std::span<double> scratch) const noexcept {
        if (substeps == 1) {
            standard_normals(first, out);
            return;
        }
        for (double& x : out) x = 0.0;
        for (std::uint32_t j = 0; j < substeps; ++j) {
            standard_normals(first + j, scratch.first(out.size()));
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += scratch[i];
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(substeps));
        for (double& x : out) x *= scale;
    }

private:
    // 53 random bits mapped into (0, 1); never returns 0 so log() is finite.
    static double to_open_unit(std::uint32_t lo, std::uint32_t hi) noexcept {
        const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
    std::uint64_t trajectory_;
};

}  // namespace ppimex
