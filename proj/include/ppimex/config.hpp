#pragma once

#include "ppimex/problem.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ppimex {

/// Raised for malformed or inconsistent configuration text.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Problem definition read from `key = value` text.
///
/// Keys: model = spectral|grid, n, lambda_law = dirichlet_1d | comma list,
/// q_law = one | geometric:r | comma list, b = constant | comma list,
/// sigma, nonlinearity = none|linear:k|sin|cubic, lipschitz. Lines starting
/// with '#' are comments.
struct ProblemConfig {
    enum class Model { spectral, grid };

    Model model = Model::spectral;
    std::size_t n = 0;
    std::string lambda_law = "dirichlet_1d";
    std::string q_law = "one";
    std::optional<std::string> b;
    double sigma = 1.0;
    std::string nonlinearity = "none";
    std::optional<double> lipschitz;

    SpectralProblem spectral() const;
    GridProblem grid() const;
    /// Lowers either model to a semilinear system.
    SemilinearSystem system() const;
    /// Spectral lowering without the dissipation check L < lambda_1, for
    /// finite-dimensional SDEs whose total drift is still dissipative.
    SemilinearSystem sde_system() const;

    /// Canonical `key = value` lines, in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Parsed `key = value` pairs, preserving no order.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

/// Consumes the problem keys from `kv` (removing them) and validates them.
ProblemConfig take_problem_config(KeyValues& kv, ProblemConfig defaults = {},
                                  bool require_dissipation = true);

/// Comma- or space-separated reals; `1/8` style fractions are accepted.
std::vector<double> parse_real_list(std::string_view text);
double parse_real(std::string_view text);
std::uint64_t parse_unsigned(std::string_view text);

/// Shortest round-trip decimal form of a double.
std::string format_real(double x);

}  // namespace ppimex
