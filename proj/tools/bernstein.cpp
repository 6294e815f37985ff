// Command-line entry point: run scenarios, suites and constant reports.

#include "bernstein/error.hpp"
#include "bernstein/scenario.hpp"
#include "bernstein/suites.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

// 0 verified / suite passed, 1 not verified, 2 bad input, 3 compute failure.
constexpr int kNotVerified = 1;
constexpr int kBadInput = 2;
constexpr int kComputeFailure = 3;

int run_command(const std::string& path) {
    const auto scenario = bernstein::load_scenario(path);
    if (scenario.suite && !scenario.theorem) {
        std::cerr << "scenario names a suite; use `bernstein suite " << bernstein::to_string(*scenario.suite)
                  << "`\n";
        return kBadInput;
    }
    const auto result = bernstein::run_scenario(scenario);
    const std::string dir = bernstein::output_directory(scenario);
    bernstein::write_artifacts(dir, scenario.name, result.report_json, result.csv);

    const auto& r = result.report;
    std::printf("%s %s: verdict %s, worst margin %.4g (slack %.3g), window [0, %.6g]\n", scenario.name.c_str(),
                bernstein::to_string(r.theorem).c_str(), bernstein::to_string(r.verdict).c_str(), r.worst_margin,
                r.slack, r.window_end);
    std::printf("  %s = %.17g, %s = %.17g\n", r.constants.bound_name(1).c_str(), r.bound_u,
                r.constants.bound_name(2).c_str(), r.bound_v);
    for (const auto& g : r.gates) {
        if (!g.passed) std::printf("  gate %s failed: %s\n", g.name.c_str(), g.detail.c_str());
    }
    std::printf("  artifacts: %s/%s.report.json, %s/%s.csv\n", dir.c_str(), scenario.name.c_str(), dir.c_str(),
                scenario.name.c_str());
    return result.verified ? 0 : kNotVerified;
}

int suite_command(const std::string& name, std::uint64_t seed, int count, const std::string& out) {
    const auto tag = bernstein::parse_suite(name);
    bernstein::SuiteResult result;
    switch (tag) {
        case bernstein::SuiteTag::identities: result = bernstein::run_identities_suite(seed); break;
        case bernstein::SuiteTag::inequalities: result = bernstein::run_inequalities_suite(seed, count); break;
        case bernstein::SuiteTag::convergence: result = bernstein::run_convergence_suite(seed); break;
    }
    nlohmann::json report = result.to_json();
    report["seed"] = seed;
    if (tag == bernstein::SuiteTag::inequalities) report["count"] = count;

    std::string dir = out;
    if (const char* env = std::getenv("BERNSTEIN_OUTPUT_DIR"); env && *env) dir = env;
    bernstein::write_artifacts(dir, name, report, result.trends_csv());

    for (const auto& c : result.checks) {
        std::printf("[%s] %s: %s\n", c.passed ? "pass" : (c.required ? "FAIL" : "info"), c.name.c_str(),
                    c.detail.c_str());
    }
    std::printf("suite %s %s\n", name.c_str(), result.passed() ? "passed" : "failed");
    return result.passed() ? 0 : kNotVerified;
}

int constants_command(const std::string& path) {
    const auto scenario = bernstein::load_scenario(path);
    if (!scenario.theorem) throw bernstein::InvalidInput("constants needs a scenario with a theorem");
    const auto setup = bernstein::setup_scenario(scenario);
    const std::vector<bernstein::DiscreteManifold> snaps{setup.manifold};
    const auto c = bernstein::scenario_constants(scenario, snaps, setup.chi, setup.u0, setup.v0);
    nlohmann::json j = bernstein::constants_json(c);
    if (bernstein::is_evolving(*scenario.theorem)) {
        j["note"] = "evaluated on the initial metric only; `run` takes the max over every snapshot";
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int describe_command() {
    const nlohmann::json catalog = {
        {"manifolds",
         {{{"kind", "torus-grid"}, {"keys", {"resolution", "side", "m"}}, {"note", "periodic square of period side"}},
          {{"kind", "flat-patch-grid"}, {"keys", {"resolution", "side", "m"}}, {"note", "[-side/2, side/2]^2"}},
          {{"kind", "sphere-grid"},
           {"keys", {"resolution", "radius", "m"}},
           {"note", "latitude/longitude grid, resolution [n_theta, n_phi], n_phi even"}},
          {{"kind", "weighted-graph"},
           {"keys", {"graph.nodes", "graph.side", "graph.edges", "m"}},
           {"note", "ring lattice unless explicit edges [from, to, weight] are given"}}}},
        {"weights",
         {{{"kind", "zero"}},
          {{"kind", "linear-in-coordinate"}, {"keys", {"amplitude", "axis"}}},
          {{"kind", "sine"}, {"keys", {"amplitude", "axis", "wavenumber"}}},
          {{"kind", "radial-gaussian"}, {"keys", {"amplitude", "center", "width"}}}}},
        {"cutoffs",
         {{{"region", "whole"}, {"note", "chi = 1"}},
          {{"region", "ball"}, {"keys", {"center", "radius", "degree"}}},
          {{"region", "annulus"}, {"keys", {"center", "inner_radius", "radius", "degree"}}}}},
        {"systems", {"linear", "exponential"}},
        {"flows", {"none", "local-ricci"}},
        {"theorems", {"T1", "T2", "T3", "T4"}},
        {"suites", {"identities", "inequalities", "convergence"}},
        {"fields", {"cos", "sin", "height", "random"}},
        {"output_env", "BERNSTEIN_OUTPUT_DIR"},
        {"csv_header", bernstein::kCsvHeader},
        {"report_schema", bernstein::kReportSchema}};
    std::cout << catalog.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-estimate verifier for coupled parabolic systems on weighted manifolds"};
    app.require_subcommand(1);

    std::string scenario_path;
    auto* run = app.add_subcommand("run", "Solve a scenario and check its theorem bound");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);

    std::string suite_name;
    std::uint64_t seed = 1;
    int count = 1000;
    std::string suite_out = ".";
    auto* suite = app.add_subcommand("suite", "Run a verification suite");
    suite->add_option("name", suite_name, "identities | inequalities | convergence")
        ->required()
        ->check(CLI::IsMember({"identities", "inequalities", "convergence"}));
    suite->add_option("--seed", seed, "Seed for random fields");
    suite->add_option("--count", count, "Number of fuzzed fields (inequalities)")->check(CLI::PositiveNumber);
    suite->add_option("--output-dir", suite_out, "Directory for the report and convergence CSV");

    std::string constants_path;
    auto* constants = app.add_subcommand("constants", "Print the theorem constants of a scenario");
    constants->add_option("scenario", constants_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);

    auto* describe = app.add_subcommand("describe", "List the manifold, weight and cutoff catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(scenario_path);
        if (*suite) return suite_command(suite_name, seed, count, suite_out);
        if (*constants) return constants_command(constants_path);
        if (*describe) return describe_command();
    } catch (const bernstein::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kBadInput;
    } catch (const bernstein::UnsupportedGeometry& e) {
        std::cerr << "unsupported geometry: " << e.what() << '\n';
        return kBadInput;
    } catch (const bernstein::MetricDegeneration& e) {
        std::cerr << "metric degeneration: " << e.what() << '\n';
        return kComputeFailure;
    } catch (const bernstein::NonFiniteField& e) {
        std::cerr << "non-finite field: " << e.what() << '\n';
        return kComputeFailure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kBadInput;
    }
    return 0;
}
