#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace ppimex {

/// One-step methods analysed on the test equation dX = (lambda + b')X dt + sigma dW,
/// with z = -lambda h treated implicitly and beta = -b h explicitly.
enum class Method { euler, trapezoidal, new_method };

std::string_view method_name(Method method);
/// Accepts `euler`, `trapezoidal`, `new`, `new_method`.
Method parse_method(std::string_view text);

/// Rational stability functions of a method:
///   X_{n+1} = A(z,beta) X_n + sigma sqrt(h) B(z,beta) xi_n
///   Xbar_n  = C(z) X_n + sigma sqrt(h) D(z) xi_n
/// The baselines have no postprocessor (C = 1, D = 0).
struct RationalStability {
    Method method = Method::new_method;

    double A(double z, double beta = 0.0) const;
    double B(double z, double beta = 0.0) const;
    double C(double z) const;
    double D(double z) const;
};

/// R(z, beta) = -2(z+beta) B^2 / (1 - A^2): limiting second moment of the
/// chain divided by sigma^2 / (2(lambda+b)). Empty when |A| >= 1. Throws
/// std::invalid_argument for z > 0 or non-finite input.
std::optional<double> moment_ratio(Method method, double z, double beta = 0.0);

/// Rbar = C^2 R - 2(z+beta) D^2, the same ratio for the postprocessed chain.
/// Equal to R for the baselines.
std::optional<double> postprocessed_moment_ratio(Method method, double z, double beta = 0.0);

/// Closed rational form of Rbar for the new method,
/// 1 + beta z (P1 beta + P2) / ((2 + beta - z) P3).
double postprocessed_moment_ratio_closed_form(double z, double beta);

/// 1 - Rbar for the new method from the closed form, free of cancellation.
double postprocessed_moment_defect(double z, double beta);

/// Right-hand side |z beta| (15 - 6 sqrt2) / (4 (1-z)^2) of the error bound.
double postprocessed_error_bound(double z, double beta);

struct BoundCheck {
    double max_ratio = 0.0;
    double argmax_z = 0.0;
    double argmax_beta = 0.0;
    std::size_t evaluated = 0;
    /// Pairs outside z <= 0, beta in (-1, min(1, |z|)).
    std::size_t skipped = 0;
    bool holds() const { return max_ratio <= 1.0; }
};

/// Evaluates |1 - Rbar| / bound over the grid product. Ratios on the lines
/// z = 0 or beta = 0 are 0 by continuity.
BoundCheck check_postprocessed_error_bound(std::span<const double> z_grid,
                                           std::span<const double> beta_grid);

enum class StabilityClass { L_stable, A_stable_only, unstable_region };

std::string_view stability_class_name(StabilityClass c);

/// Classifies by |A(-1e12)|: below 1e-6 is L-stable, within 1e-6 of 1 is
/// A-stable only, anything else is reported as an unstable region.
StabilityClass l_stability_verdict(Method method);

}  // namespace ppimex
