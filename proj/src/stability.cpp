#include "ppimex/stability.hpp"

#include "ppimex/resolvent.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ppimex {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;

void check_argument(double z, double beta) {
    if (!std::isfinite(z) || !std::isfinite(beta))
        throw std::invalid_argument("stability functions need finite arguments");
    if (z > 0.0) throw std::invalid_argument("stability functions need z <= 0");
}
}  // namespace

std::string_view method_name(Method method) {
    switch (method) {
        case Method::euler: return "euler";
        case Method::trapezoidal: return "trapezoidal";
        case Method::new_method: return "new_method";
    }
    return "?";
}

Method parse_method(std::string_view text) {
    if (text == "euler" || text == "linearized_euler") return Method::euler;
    if (text == "trapezoidal" || text == "crank_nicolson") return Method::trapezoidal;
    if (text == "new" || text == "new_method" || text == "postprocessed") return Method::new_method;
    throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

double RationalStability::A(double z, double beta) const {
    switch (method) {
        case Method::euler:
        case Method::new_method: return (1.0 + beta) / (1.0 - z);
        case Method::trapezoidal: return (1.0 + 0.5 * z + beta) / (1.0 - 0.5 * z);
    }
    return 0.0;
}

double RationalStability::B(double z, double beta) const {
    switch (method) {
        case Method::euler: return 1.0 / (1.0 - z);
        case Method::trapezoidal: return 1.0 / (1.0 - 0.5 * z);
        case Method::new_method:
            return (1.0 + 0.5 * beta - kGamma * z) / ((1.0 - z) * (1.0 - kGamma * z));
    }
    return 0.0;
}

double RationalStability::C(double) const { return 1.0; }

double RationalStability::D(double z) const {
    if (method != Method::new_method) return 0.0;
    return 0.5 / std::sqrt(1.0 - 0.5 * z);
}

std::optional<double> moment_ratio(Method method, double z, double beta) {
    check_argument(z, beta);
    // A = p/q with q - p = -(z + beta), so 1 - A^2 = -(z+beta)(q+p)/q^2.
    double p = 0.0, q = 0.0;
    switch (method) {
        case Method::euler:
        case Method::new_method:
            p = 1.0 + beta;
            q = 1.0 - z;
            break;
        case Method::trapezoidal:
            p = 1.0 + 0.5 * z + beta;
            q = 1.0 - 0.5 * z;
            break;
    }
    if (!(-(z + beta) > 0.0 && q + p > 0.0)) return std::nullopt;
    const double b = RationalStability{method}.B(z, beta);
    return 2.0 * b * b * q * q / (q + p);
}

std::optional<double> postprocessed_moment_ratio(Method method, double z, double beta) {
    const auto r = moment_ratio(method, z, beta);
    if (!r) return std::nullopt;
    const RationalStability s{method};
    const double c = s.C(z), d = s.D(z);
    return c * c * *r - 2.0 * (z + beta) * d * d;
}

double postprocessed_moment_defect(double z, double beta) {
    check_argument(z, beta);
    const double p1 = 10.0 - 4.0 * kSqrt2 - (11.0 - 6.0 * kSqrt2) * z;
    const double p2 =
        20.0 - 8.0 * kSqrt2 - (44.0 - 24.0 * kSqrt2) * z + (11.0 - 6.0 * kSqrt2) * z * z;
    const double k = 2.0 - (3.0 - kSqrt2) * z;
    const double p3 = (2.0 - z) * k * k;
    return -beta * z * (p1 * beta + p2) / ((2.0 + beta - z) * p3);
}

double postprocessed_moment_ratio_closed_form(double z, double beta) {
    return 1.0 - postprocessed_moment_defect(z, beta);
}

double postprocessed_error_bound(double z, double beta) {
    return std::abs(z * beta) * (15.0 - 6.0 * kSqrt2) / (4.0 * (1.0 - z) * (1.0 - z));
}

BoundCheck check_postprocessed_error_bound(std::span<const double> z_grid,
                                           std::span<const double> beta_grid) {
    BoundCheck out;
    for (double z : z_grid) {
        for (double beta : beta_grid) {
            if (!(z <= 0.0) || !(beta > -1.0) || !(beta < std::min(1.0, std::abs(z)))) {
                if (!(z == 0.0 && beta == 0.0)) {
                    ++out.skipped;
                    continue;
                }
            }
            ++out.evaluated;
            double ratio = 0.0;
            if (z != 0.0 && beta != 0.0)
                ratio = std::abs(postprocessed_moment_defect(z, beta)) /
                        postprocessed_error_bound(z, beta);
            if (ratio > out.max_ratio || out.evaluated == 1) {
                out.max_ratio = std::max(out.max_ratio, ratio);
                out.argmax_z = z;
                out.argmax_beta = beta;
            }
        }
    }
    return out;
}

std::string_view stability_class_name(StabilityClass c) {
    switch (c) {
        case StabilityClass::L_stable: return "L_stable";
        case StabilityClass::A_stable_only: return "A_stable_only";
        case StabilityClass::unstable_region: return "unstable_region";
    }
    return "?";
}

StabilityClass l_stability_verdict(Method method) {
    const double a = std::abs(RationalStability{method}.A(-1e12, 0.0));
    if (a < 1e-6) return StabilityClass::L_stable;
    if (a > 1.0 - 1e-6 && a <= 1.0 + 1e-6) return StabilityClass::A_stable_only;
    return StabilityClass::unstable_region;
}

}  // namespace ppimex
