#pragma once

#include "ppimex/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppimex {

enum class Suite { stability, conditions, gaussian_order, regularity, mc_sde, mc_spde, trajectory_demo };

struct SuiteInfo {
    Suite suite;
    std::string_view name;
    std::string_view description;
};

std::span<const SuiteInfo> suites();
std::optional<Suite> parse_suite(std::string_view name);
/// Closest suite name by edit distance.
std::string_view suggest_suite(std::string_view name);
std::string_view suite_name(Suite suite);

/// Exit codes of run_experiment.
enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitConfig = 2, kExitNumerical = 3 };

struct ExperimentSpec {
    Suite suite = Suite::stability;
    /// Suite and problem keys (`key = value`), e.g. read from --config.
    KeyValues settings;
    std::filesystem::path out_dir = "ppimex_out";
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> samples;
    std::optional<std::vector<double>> h_grid;
    std::optional<std::size_t> modes;
    /// Worker threads for Monte-Carlo suites; 0 uses the default. Not part
    /// of the manifest since results do not depend on it.
    unsigned workers = 0;
};

struct ExperimentOutcome {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> failed_checks;
    std::string summary;
};

/// Runs a suite, writes its CSV files and manifest.txt into out_dir and
/// returns the outcome. Configuration problems give kExitConfig, numerical
/// aborts kExitNumerical and failed suite checks kExitAssertion.
ExperimentOutcome run_experiment(const ExperimentSpec& spec, std::ostream& log);

/// Human-readable suite listing.
std::string list_suites();

/// Library version string.
std::string_view version();

}  // namespace ppimex
