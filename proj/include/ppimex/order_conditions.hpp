#pragma once

#include "ppimex/integrators.hpp"
#include "ppimex/stats.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ppimex {

/// Residuals of the four scalar second-order conditions of the perturbed
/// Euler family, plus whether the postprocessor weights differ (b1 != b2),
/// which would require the implicit and explicit fields to commute.
struct ConditionResiduals {
    double r1 = 0.0;  // a1^2 + 2 a1 + b1 - c^2
    double r2 = 0.0;  // a1 + a3 + 1/4 + b1 - c^2
    double r3 = 0.0;  // a2^2 + b2 - c^2
    double r4 = 0.0;  // -1/4 + a2 + b2 - c^2
    bool commutator_required = false;

    double max_abs() const;
    bool satisfied(double tolerance) const {
        return !commutator_required && max_abs() <= tolerance;
    }
};

ConditionResiduals check_conditions(const SchemeCoefficients& coeffs);

class NoRealSolution : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// All order-two coefficient sets with b1 = b2 = b, ordered by |a1|.
/// c is taken nonnegative. Throws std::invalid_argument when b1 != b2 and
/// NoRealSolution when b < -1/4.
std::vector<SchemeCoefficients> solve_family(double b1, double b2);

struct LocalOrderConfig {
    double lambda = 1.0;  // implicit rate
    double b = 0.0;       // explicit linear decay
    double sigma = 1.0;
    double x0 = 0.5;
    std::vector<double> h_grid;
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 1;
};

struct LocalOrderResult {
    std::vector<double> h;
    std::vector<double> error;   // E phi(X_1) - E phi(X(h))
    std::vector<double> std_error;  // Monte-Carlo standard error of each entry
    LineFit fit;
    /// True when some |error| is below 3 std_error or the fit residual is large.
    bool noise_dominated = false;
};

/// One-step weak error of a scheme on the scalar Ornstein-Uhlenbeck test
/// problem dX = -(lambda + b) X dt + sigma dW against the exact transition,
/// coupled through the same Gaussian draw, for phi(x) = x^2 unless given.
/// The fitted log-log slope estimates q + 1.
LocalOrderResult estimate_local_weak_order(Scheme scheme, const LocalOrderConfig& config,
                                           const std::function<double(double)>& phi = {});

}  // namespace ppimex
