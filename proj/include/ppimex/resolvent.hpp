#pragma once

#include "ppimex/problem.hpp"

#include <numbers>
#include <span>
#include <vector>

namespace ppimex {

/// Implicitness factor (3 - sqrt 2)/2 of the second resolvent.
inline constexpr double kGamma = (3.0 - std::numbers::sqrt2) / 2.0;

/// J1 = (I - hA)^{-1}, J2 = (I - kGamma h A)^{-1}, J3 = (I - (h/2)A)^{-1/2}.
enum class ResolventKind { J1, J2, J3 };

/// Linear solves of a fixed system at a fixed step size.
///
/// Diagonal systems store per-component factors. Grid systems store the
/// constant-coefficient tridiagonal eliminations for the three shifted
/// operators and a dense symmetric J3 built from the closed-form sine
/// eigenvectors, so that J3 J3^T = (I - (h/2)A)^{-1}. Immutable after
/// construction; safe to share between threads.
class Resolvents {
public:
    Resolvents(const SemilinearSystem& system, double h);

    double h() const { return h_; }
    std::size_t dim() const { return dim_; }

    /// out = J v. `out` may alias `v`.
    void apply(ResolventKind kind, std::span<const double> v, std::span<double> out) const;
    /// out = (I - (h/2)A)^{-1} v. `out` may alias `v`.
    void apply_half(std::span<const double> v, std::span<double> out) const;

private:
    struct Tridiagonal {
        double diag = 1.0;
        double off = 0.0;
        std::vector<double> upper;      // modified super-diagonal
        std::vector<double> inv_pivot;  // reciprocal eliminated pivots
        void build(std::size_t n, double d, double e);
        void solve(std::span<const double> v, std::span<double> out) const;
    };

    void check(std::span<const double> v, std::span<double> out) const;

    double h_;
    std::size_t dim_;
    bool diagonal_;
    // diagonal case
    std::vector<double> j1_, j2_, j3_, jhalf_;
    // grid case
    Tridiagonal t1_, t2_, thalf_;
    std::vector<double> j3_dense_;
};

/// Single-shot convenience wrapper around Resolvents.
std::vector<double> resolvent_apply(const SemilinearSystem& system, ResolventKind kind, double h,
                                    std::span<const double> v);
std::vector<double> resolvent_apply(const SpectralProblem& problem, ResolventKind kind, double h,
                                    std::span<const double> v);
std::vector<double> resolvent_apply(const GridProblem& problem, ResolventKind kind, double h,
                                    std::span<const double> v);

/// Orthonormal discrete sine basis S_{jp} = sqrt(2/(N+1)) sin(j p pi/(N+1)),
/// row-major, symmetric and involutory.
std::vector<double> sine_basis(std::size_t n);

}  // namespace ppimex
