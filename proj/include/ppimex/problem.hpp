#pragma once

#include "ppimex/nonlinearity.hpp"
#include "ppimex/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppimex {

/// Raised when a problem definition violates one of its invariants.
class ProblemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Eigenvalues p^2 pi^2, p = 1..n, of the 1D Dirichlet Laplacian on (0,1).
std::vector<double> dirichlet_1d_eigenvalues(std::size_t n);

/// Finite-dimensional semilinear system dX = (A X + F(X)) dt + sigma dW^Q.
///
/// -A is symmetric positive definite and either diagonal (spectral Galerkin)
/// or the 3-point Dirichlet Laplacian on a uniform grid. Q is diagonal in the
/// same basis, stored as per-component noise scales sqrt(q). F is either a
/// per-component linear decay F(u)_p = -b_p u_p or a componentwise map f.
///
/// This type carries no dissipativity requirement; SpectralProblem and
/// GridProblem validate the SPDE-level invariants and then lower to it.
class SemilinearSystem {
public:
    enum class Operator { diagonal, dirichlet_grid };

    static SemilinearSystem diagonal(std::vector<double> lambda, std::vector<double> noise_scale,
                                     Nonlinearity f, double sigma,
                                     std::optional<std::vector<double>> linear_decay = {});
    static SemilinearSystem dirichlet_grid(std::size_t n_points, Nonlinearity f, double sigma);

    Operator op() const { return op_; }
    std::size_t dim() const { return lambda_.size(); }
    /// Eigenvalues of -A (for grids: (2/dx^2)(1 - cos(p pi dx))).
    std::span<const double> lambda() const { return lambda_; }
    std::span<const double> noise_scale() const { return noise_scale_; }
    double dx() const { return dx_; }
    double sigma() const { return sigma_; }
    const Nonlinearity& nonlinearity() const { return f_; }
    const std::optional<std::vector<double>>& linear_decay() const { return decay_; }
    bool drift_is_zero() const { return !decay_ && f_.is_zero(); }

    /// out = F(u).
    void drift(std::span<const double> u, std::span<double> out) const;
    /// out = A u.
    void apply_operator(std::span<const double> u, std::span<double> out) const;
    /// Squared L2 norm: sum u_p^2 for spectral coordinates, dx sum u_j^2 on grids.
    double squared_norm(std::span<const double> u) const;

private:
    SemilinearSystem() = default;

    Operator op_ = Operator::diagonal;
    std::vector<double> lambda_;
    std::vector<double> noise_scale_;
    double dx_ = 0.0;
    double sigma_ = 0.0;
    Nonlinearity f_;
    std::optional<std::vector<double>> decay_;
};

/// Diagonal model of the SPDE in the eigenbasis of -A.
struct SpectralProblem {
    std::vector<double> lambda;
    std::vector<double> q;
    std::optional<std::vector<double>> b;
    std::optional<Nonlinearity> nonlinearity;
    double sigma = 1.0;

    std::size_t n_modes() const { return lambda.size(); }

    /// Throws ProblemError when an invariant is violated.
    void validate() const;
    SemilinearSystem system() const;

    /// Heat-equation spectrum with q_p = 1 (space-time white noise).
    static SpectralProblem white_noise_heat(std::size_t n_modes, double sigma = 1.0);
};

/// Finite-difference model of the 1D stochastic heat equation on (0,1).
struct GridProblem {
    std::size_t n_points = 0;
    double dx = 0.0;
    Nonlinearity nonlinearity;
    double sigma = 1.0;

    static GridProblem make(std::size_t n_points, Nonlinearity f = {}, double sigma = 1.0);

    void validate() const;
    SemilinearSystem system() const;
    /// Eigenvalues (2/dx^2)(1 - cos(p pi dx)), p = 1..N, of the tridiagonal -A.
    std::vector<double> eigenvalues() const;
};

/// Fills `out` with sqrt(q_p) xi_p (spectral) or xi_j / sqrt(dx) (grid).
void sample_noise_increment(const SemilinearSystem& system, const NoiseStream& stream,
                            std::uint32_t step, std::span<double> out);

/// Truncated traces Trace((-A)^{-1+s} Q) and the resulting estimate of the
/// supremum of admissible s.
struct TraceDiagnostics {
    struct Entry {
        double s;
        std::vector<double> partial_traces;  // one per truncation level
        bool convergent;
    };
    std::vector<std::size_t> truncations;
    std::vector<Entry> entries;
    /// Largest s on the grid judged convergent, 0 when none is.
    double s_bar;
};

/// A truncated series is judged convergent when the last two truncation
/// levels differ by less than `tolerance` relative to the larger sum.
TraceDiagnostics estimate_s_bar(const SpectralProblem& problem, std::span<const double> s_grid,
                                std::span<const std::size_t> truncations,
                                double tolerance = 0.01);

}  // namespace ppimex
