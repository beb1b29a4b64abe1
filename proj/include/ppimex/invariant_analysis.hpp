#pragma once

#include "ppimex/problem.hpp"
#include "ppimex/stability.hpp"
#include "ppimex/stats.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ppimex {

/// Centered Gaussian with a covariance that is diagonal in the eigenbasis.
struct DiagonalGaussian {
    std::vector<double> variances;

    std::size_t dim() const { return variances.size(); }
    double trace() const;
};

/// Raised when a mode of a scheme is not mean-square stable at the given h.
class UnstableMode : public std::domain_error {
public:
    UnstableMode(std::size_t index, double h);
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Per-mode linear decay b_p of a linear problem: the explicit b vector, the
/// slope of a `linear:k` nonlinearity, or zero. Throws ProblemError for any
/// other nonlinearity.
std::vector<double> linear_decay_of(const SpectralProblem& problem);

/// Invariant law of the continuous linear system: variances sigma^2 q_p / (2(lambda_p + b_p)).
DiagonalGaussian exact_invariant(const SpectralProblem& problem);

/// Chains whose stationary laws are available in closed form.
enum class Chain { exact, euler, trapezoidal, new_primary, new_postprocessed };

std::string_view chain_name(Chain chain);

/// Stationary law of a chain through the stability ratios R and Rbar.
DiagonalGaussian chain_invariant(const SpectralProblem& problem, Chain chain, double h);

/// Same law by iterating the per-mode variance recursion v <- A^2 v + c to
/// its fixed point (independent of the closed forms above).
DiagonalGaussian chain_invariant_by_recursion(const SpectralProblem& problem, Chain chain,
                                              double h);

/// Sampled law of a method: the postprocessed chain for the new method.
DiagonalGaussian scheme_invariant(const SpectralProblem& problem, Method method, double h);

/// (hess_sup / 2) sum_p |q2_p - q1_p|, an upper bound on the gap between
/// integrals of a test function with Hessian norm at most hess_sup.
double trace_distance_bound(const DiagonalGaussian& g1, const DiagonalGaussian& g2,
                            double hess_sup);

/// sum_p |q2_p - q1_p|.
double trace_distance(const DiagonalGaussian& g1, const DiagonalGaussian& g2);

/// Integral of exp(-|u|^2): prod_p (1 + 2 q_p)^{-1/2}.
double gaussian_exp_functional(const DiagonalGaussian& g);

/// Trace(Q2 - Q1) / exp(6 Trace Q2); a lower bound for the gap in
/// exp(-|u|^2) integrals when q2 >= q1 componentwise. Throws otherwise.
double trace_distance_lower_bound(const DiagonalGaussian& g1, const DiagonalGaussian& g2);

struct OrderStudy {
    std::vector<double> h;
    std::vector<double> distance;    // sum_p |qbar_p(h) - q_p|
    std::vector<double> tail_ratio;  // |D_N - D_{N/2}| / D_N
    /// Empty when some distance vanishes (exact method).
    std::optional<LineFit> fit;
    bool exact = false;
};

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trace distance between the sampled and exact invariant laws over an h
/// grid, with a log-log slope fit. Each distance is compared with the one at
/// half the truncation; a relative change above `tail_tolerance` throws
/// TruncationError.
OrderStudy convergence_order_study(const SpectralProblem& problem, Method method,
                                   std::span<const double> h_grid,
                                   double tail_tolerance = 0.01);

struct RegularityProfile {
    std::vector<double> s_values;
    std::vector<double> moments;       // sum_p var_p lambda_p^s over all modes
    std::vector<double> half_moments;  // same over the first half of the modes
    std::vector<bool> convergent;
    /// Largest s judged convergent; 0 when none is.
    double reg_estimate = 0.0;
};

/// Truncated moments sum_p var_p lambda_p^s of a stationary chain with the
/// verdict "divergent" when doubling the truncation grows the sum by more
/// than `divergence_ratio`. Requires F = 0.
RegularityProfile regularity_profile(const SpectralProblem& problem, Chain chain, double h,
                                     std::span<const double> s_grid,
                                     double divergence_ratio = 1.05);

/// Uniform grid lo, lo + step, ..., up to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace ppimex
