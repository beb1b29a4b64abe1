#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <string_view>

namespace ppimex {

enum class NonlinearityKind { none, linear, sine, cubic, custom };

/// Componentwise drift f: R -> R with a declared global Lipschitz constant.
///
/// Built-in laws:
///   none      f(u) = 0
///   linear:k  f(u) = -k u
///   sin       f(u) = -u - sin(u)      (L = 2)
///   cubic     f(u) = -2u - u^3        (not globally Lipschitz, L = +inf)
class Nonlinearity {
public:
    Nonlinearity() = default;

    static Nonlinearity zero() { return {}; }
    static Nonlinearity linear(double k);
    static Nonlinearity sine();
    static Nonlinearity cubic();
    static Nonlinearity custom(std::function<double(double)> f,
                               std::function<double(double)> derivative, double lipschitz,
                               std::string name = "custom");

    /// Parses `none`, `linear:k`, `sin`, `cubic`. Throws std::invalid_argument.
    static Nonlinearity parse(std::string_view text);

    double operator()(double u) const {
        switch (kind_) {
            case NonlinearityKind::none: return 0.0;
            case NonlinearityKind::linear: return -k_ * u;
            case NonlinearityKind::sine: return -u - std::sin(u);
            case NonlinearityKind::cubic: return -2.0 * u - u * u * u;
            case NonlinearityKind::custom: return f_(u);
        }
        return 0.0;
    }

    double derivative(double u) const {
        switch (kind_) {
            case NonlinearityKind::none: return 0.0;
            case NonlinearityKind::linear: return -k_;
            case NonlinearityKind::sine: return -1.0 - std::cos(u);
            case NonlinearityKind::cubic: return -2.0 - 3.0 * u * u;
            case NonlinearityKind::custom: return df_(u);
        }
        return 0.0;
    }

    NonlinearityKind kind() const { return kind_; }
    bool is_zero() const { return kind_ == NonlinearityKind::none; }
    /// Slope k of a `linear:k` law; zero otherwise.
    double linear_rate() const { return kind_ == NonlinearityKind::linear ? k_ : 0.0; }
    double lipschitz() const { return lipschitz_; }
    void set_lipschitz(double L) { lipschitz_ = L; }
    std::string name() const;

private:
    NonlinearityKind kind_ = NonlinearityKind::none;
    double k_ = 0.0;
    double lipschitz_ = 0.0;
    std::function<double(double)> f_;
    std::function<double(double)> df_;
    std::string custom_name_;
};

}  // namespace ppimex
