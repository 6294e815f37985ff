#pragma once

#include "bernstein/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bernstein {

struct SuiteCheck {
    std::string name;
    bool passed = false;
    bool required = true;  // false: reported only
    std::string detail;
    std::optional<ConvergenceTrend> trend;
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteCheck> checks;

    bool passed() const;
    const SuiteCheck& find(const std::string& name) const;
    nlohmann::json to_json() const;
    /// quantity,level,spacing,value,fitted_order for every trend.
    std::string trends_csv() const;
};

/// Delta_f(u^2) and Bochner residuals under dyadic refinement.
SuiteResult run_identities_suite(std::uint64_t seed = 1);

/// `count` seeded band-limited fields against the pointwise proof
/// inequalities on a torus with a bump cutoff and a sine weight.
SuiteResult run_inequalities_suite(std::uint64_t seed = 1, int count = 1000);

/// Bernstein margin of the reference linear torus scenario over 32, 64,
/// 128 and the evolution-equation residual on the static torus and the
/// flowing sphere.
SuiteResult run_convergence_suite(std::uint64_t seed = 1);

/// Worst relative margin of the reference linear torus scenario
/// (u0 = 1 + cos(x)/2, v0 = 1, chi = 1, f = 0, T = 1) at resolution n^2.
double reference_torus_margin(int n);

}  // namespace bernstein
