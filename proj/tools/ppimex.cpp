/// Command-line entry point for the experiment suites.

#include "ppimex/config.hpp"
#include "ppimex/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace ppimex;

    CLI::App app{"Postprocessed IMEX integrators for invariant-measure sampling"};
    app.set_version_flag("--version", std::string(version()));

    std::string suite_text;
    std::string config_path;
    std::uint64_t seed = 1;
    std::string samples_text;
    std::string h_grid_text;
    std::size_t modes = 0;
    std::string out_dir = "ppimex_out";
    unsigned workers = 0;
    bool list = false;

    app.add_option("--suite", suite_text, "Experiment suite to run");
    app.add_option("--config", config_path, "Key = value configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--samples", samples_text, "Monte-Carlo sample count (accepts 1e5)");
    app.add_option("--h-grid", h_grid_text, "Comma-separated step sizes (accepts 1/8)");
    app.add_option("--modes", modes, "Number of modes or grid points")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--workers", workers,
                   "Worker threads (0: PPIMEX_WORKERS or hardware concurrency)");
    app.add_flag("--list", list, "List available suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (list || suite_text.empty()) {
        std::cout << list_suites();
        return kExitOk;
    }

    const auto suite = parse_suite(suite_text);
    if (!suite) {
        std::cerr << "unknown suite '" << suite_text << "'; did you mean '"
                  << suggest_suite(suite_text) << "'?\n";
        return kExitConfig;
    }

    ExperimentSpec spec;
    spec.suite = *suite;
    spec.out_dir = out_dir;
    spec.seed = seed;
    spec.workers = workers;
    try {
        if (!config_path.empty()) spec.settings = load_key_values(config_path);
        if (!samples_text.empty()) spec.samples = parse_unsigned(samples_text);
        if (!h_grid_text.empty()) spec.h_grid = parse_real_list(h_grid_text);
        if (modes > 0) spec.modes = modes;
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }

    const auto outcome = run_experiment(spec, std::cout);
    for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
    if (!outcome.failed_checks.empty())
        std::cerr << outcome.failed_checks.size() << " check(s) failed\n";
    return outcome.exit_code;
}
