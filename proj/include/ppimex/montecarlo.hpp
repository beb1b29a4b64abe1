#pragma once

#include "ppimex/integrators.hpp"
#include "ppimex/problem.hpp"
#include "ppimex/stats.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ppimex {

enum class Functional { exp_neg_sq_norm, second_moment, custom };

std::string_view functional_name(Functional f);
Functional parse_functional(std::string_view text);

enum class ReferenceKind { none, analytic, fine_step };

struct McConfig {
    std::uint64_t n_samples = 1000;
    std::vector<double> h_grid;
    double T = 1.0;
    Functional functional = Functional::exp_neg_sq_norm;
    /// Used when functional == custom; receives the final (postprocessed) state.
    std::function<double(const SemilinearSystem&, std::span<const double>)> custom;
    std::uint64_t seed = 1;
    ReferenceKind reference = ReferenceKind::fine_step;
    double analytic_value = 0.0;
    /// Reference step; 0 selects min(h_grid)/8.
    double h_ref = 0.0;
    /// Share one Brownian path between all step sizes, schemes and the reference.
    bool coupling = true;
    /// Initial state; empty means zero.
    std::vector<double> u0;
    /// Worker threads; 0 reads PPIMEX_WORKERS, else uses the hardware count.
    unsigned workers = 0;
    /// Trajectories per deterministic reduction block.
    std::uint64_t block_size = 256;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
};

class McAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CoupledEntry {
    Scheme scheme;
    double h;
    std::uint64_t steps;
    McEstimate estimate;
    /// Estimate of E phi(scheme) - reference; empty (n = 0) without reference.
    McEstimate error;
};

struct CoupledDifference {
    Scheme first, second;
    double h;
    /// Estimate of E phi(first) - E phi(second) on shared draws.
    McEstimate difference;
};

struct CoupledResult {
    double T = 0.0;
    double base_step = 0.0;
    McEstimate reference;
    std::vector<CoupledEntry> entries;  // scheme-major, then h in grid order
    std::vector<CoupledDifference> differences;
    std::uint64_t failures = 0;

    const CoupledEntry& entry(Scheme scheme, double h) const;
};

/// Runs every scheme at every step size on the same trajectories.
///
/// With coupling, all runs are driven by one fine Brownian path with step
/// base_step (h_ref, or min(h_grid)/8, or min(h_grid) without reference);
/// coarse increments are normalised sums of fine ones, and the postprocessor
/// draw is shared. The fine-step reference is the new method at base_step.
/// Trajectories producing non-finite values count as failures and are
/// dropped from every estimate; more than 0.1% failures throws McAborted.
/// Results are independent of the worker count.
CoupledResult coupled_compare(const SemilinearSystem& system, std::span<const Scheme> schemes,
                              const McConfig& config);

/// One scheme; the reference setting of the config is honoured.
std::vector<McEstimate> estimate_functional(const SemilinearSystem& system, Scheme scheme,
                                            const McConfig& config);

struct ErrorPoint {
    double h;
    double error;
    double std_error;
};

struct OrderFit {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    std::vector<ErrorPoint> used;
    /// Points with |error| < 3 std_error.
    std::vector<ErrorPoint> excluded;
};

/// Weighted least squares of log|error| on log h with weights (|error|/std_error)^2
/// (unit weights when any std_error is zero). Needs >= 4 points and throws
/// std::invalid_argument when fewer than 3 remain after exclusion.
OrderFit global_order_fit(std::span<const ErrorPoint> points);

/// Ergodic average of the functional along one trajectory after burn-in,
/// with a batch-means standard error. The postprocessed scheme is averaged
/// over u_bar_n built from each step's own draw.
McEstimate time_average(const SemilinearSystem& system, Scheme scheme, double h,
                        std::uint64_t n_steps, std::uint64_t burn_in, std::uint64_t seed,
                        Functional functional = Functional::exp_neg_sq_norm,
                        std::uint64_t n_batches = 1000);

/// Worker count from PPIMEX_WORKERS, else the hardware concurrency (>= 1).
unsigned default_worker_count();

double evaluate_functional(Functional f, const SemilinearSystem& system,
                           std::span<const double> u);

}  // namespace ppimex
