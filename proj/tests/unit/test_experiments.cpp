#include "ppimex/experiments.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace ppimex;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ppimex_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("suite names") {
    CHECK(suites().size() == 7);
    for (const auto& s : suites()) {
        CHECK(parse_suite(s.name) == s.suite);
        CHECK(suite_name(s.suite) == s.name);
    }
    CHECK_FALSE(parse_suite("stabilty"));
    CHECK(suggest_suite("stabilty") == "stability");
    CHECK(suggest_suite("mc-spde") == "mc_spde");
    CHECK(list_suites().find("gaussian_order") != std::string::npos);
    CHECK_FALSE(version().empty());
}

TEST_CASE("conditions suite with canonical coefficients") {
    ExperimentSpec spec;
    spec.suite = Suite::conditions;
    spec.out_dir = scratch("conditions");
    std::ostringstream log;
    const auto out = run_experiment(spec, log);
    CHECK(out.exit_code == kExitOk);
    CHECK(out.summary == "all residuals 0");
    CHECK(fs::exists(spec.out_dir / "residuals.csv"));
    const auto manifest = slurp(spec.out_dir / "manifest.txt");
    CHECK(manifest.find("suite = conditions") != std::string::npos);
    CHECK(manifest.find("seed = 1") != std::string::npos);
}

TEST_CASE("conditions suite flags violating coefficients") {
    ExperimentSpec spec;
    spec.suite = Suite::conditions;
    spec.out_dir = scratch("conditions_bad");
    spec.settings = {{"a1", "0"}, {"a2", "0"}, {"a3", "0"}, {"b1", "0"}, {"b2", "0"}, {"c", "0.5"}};
    std::ostringstream log;
    const auto out = run_experiment(spec, log);
    CHECK(out.exit_code == kExitAssertion);
    CHECK(out.summary.find("residuals nonzero") != std::string::npos);
}

TEST_CASE("stability suite output") {
    ExperimentSpec spec;
    spec.suite = Suite::stability;
    spec.out_dir = scratch("stability");
    spec.settings = {{"z_points", "50"}, {"bound_points", "20"}};
    std::ostringstream log;
    const auto out = run_experiment(spec, log);
    CHECK(out.exit_code == kExitOk);
    std::ifstream in(spec.out_dir / "stability.csv");
    std::string line;
    while (std::getline(in, line) && line.starts_with("#")) {
    }
    CHECK(line == "method,z,beta,A,B,R,R_bar,R_bar_closed,bound");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows > 0);
    const auto classes = slurp(spec.out_dir / "stability_classes.csv");
    CHECK(classes.find("trapezoidal,") != std::string::npos);
    CHECK(classes.find("A_stable_only") != std::string::npos);
    CHECK(classes.rfind(",L_stable") > classes.find("new_method,"));
}

TEST_CASE("gaussian order suite") {
    ExperimentSpec spec;
    spec.suite = Suite::gaussian_order;
    spec.out_dir = scratch("gaussian");
    spec.modes = 2000;
    std::ostringstream log;
    const auto out = run_experiment(spec, log);
    CHECK(out.exit_code == kExitOk);
    CHECK(out.summary.starts_with("slopes: euler"));
    CHECK(fs::exists(spec.out_dir / "order_slopes.csv"));
}

TEST_CASE("configuration errors give exit code 2") {
    ExperimentSpec spec;
    spec.suite = Suite::conditions;
    spec.out_dir = scratch("bad_key");
    spec.settings = {{"not_a_key", "3"}};
    std::ostringstream log;
    CHECK(run_experiment(spec, log).exit_code == kExitConfig);

    spec.suite = Suite::mc_spde;
    spec.settings = {{"h_grid", "1/8"}};
    spec.h_grid = std::vector<double>{0.25};
    CHECK(run_experiment(spec, log).exit_code == kExitConfig);

    spec.settings = {{"n", "abc"}};
    spec.h_grid.reset();
    CHECK(run_experiment(spec, log).exit_code == kExitConfig);
}

TEST_CASE("Monte-Carlo output is independent of the worker count") {
    std::string first;
    for (unsigned workers : {1u, 4u, 8u}) {
        ExperimentSpec spec;
        spec.suite = Suite::mc_spde;
        spec.out_dir = scratch("workers_" + std::to_string(workers));
        spec.samples = 400;
        spec.modes = 8;
        spec.h_grid = std::vector<double>{1.0 / 8.0, 1.0 / 16.0};
        spec.workers = workers;
        std::ostringstream log;
        const auto out = run_experiment(spec, log);
        CHECK(out.exit_code != kExitConfig);
        const auto bytes = slurp(spec.out_dir / "mc.csv") + slurp(spec.out_dir / "manifest.txt");
        if (first.empty())
            first = bytes;
        else
            CHECK(bytes == first);
    }
    CHECK_FALSE(first.empty());
}
