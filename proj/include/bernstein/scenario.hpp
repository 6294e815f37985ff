#pragma once

#include "bernstein/constants.hpp"
#include "bernstein/cutoff.hpp"
#include "bernstein/dynamics.hpp"
#include "bernstein/manifold.hpp"
#include "bernstein/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bernstein {

/// One summand of an initial field.
///  - cos / sin:  amplitude * cos(wavenumber * q[axis]) (resp. sin)
///  - height:     amplitude * X[axis] / R on the sphere (ambient coordinate)
///  - random:     band-limited field with `modes` random low modes, from `seed`
struct FieldTerm {
    enum class Kind { cos, sin, height, random };
    Kind kind = Kind::cos;
    int axis = 0;
    double wavenumber = 1.0;
    double amplitude = 0.0;
    int modes = 5;
    std::uint64_t seed = 1;
};

struct FieldSpec {
    double offset = 0.0;
    std::vector<FieldTerm> terms;
};

std::vector<double> sample_field(const DiscreteManifold& manifold, const FieldSpec& spec);

/// Smooth random field: `modes` Fourier modes with wavenumbers up to 3 on
/// flat grids and rings, low-degree ambient polynomials on the sphere.
/// Amplitudes decay like 1/(1 + |k|^2).
std::vector<double> band_limited_field(const DiscreteManifold& manifold, int modes, std::uint64_t seed);

enum class SuiteTag { identities, inequalities, convergence };
std::string to_string(SuiteTag tag);
SuiteTag parse_suite(std::string_view text);

struct Tolerances {
    double slack = kDefaultSlack;
    double aux_slack = 0.02;
};

struct Scenario {
    std::string name = "scenario";
    ManifoldDescription manifold;
    CutoffDescription cutoff;
    SystemSpec system;  // u0, v0 are sampled from the field specs
    FieldSpec u0;
    FieldSpec v0;
    Flow flow = Flow::none;
    std::optional<TheoremId> theorem;
    std::optional<SuiteTag> suite;
    std::optional<double> K;   // default: certified Bakry-Emery bound
    std::optional<double> K1;  // default: certified |grad f| bound
    std::optional<double> K2;  // default: certified Hessian bound
    double gamma_K = 0.0;      // trailing constant of Gamma
    Tolerances tolerances;
    std::string output_dir = ".";
    std::uint64_t seed = 1;
    int fuzz_count = 1000;
};

/// Parses and validates a scenario; unknown keys and inconsistent
/// theorem/system/flow combinations throw InvalidInput.
Scenario parse_scenario(const nlohmann::json& document);
Scenario load_scenario(const std::string& path);
/// The scenario with every default filled in.
nlohmann::json scenario_to_json(const Scenario& scenario);

struct RunResult {
    TheoremReport report;
    AuxReport aux;
    nlohmann::json report_json;
    std::string csv;
    bool verified = false;
};

/// Builds the manifold, cutoff and initial data of a scenario.
struct ScenarioSetup {
    DiscreteManifold manifold;
    CutoffProfile chi;
    std::vector<double> u0;
    std::vector<double> v0;
};
ScenarioSetup setup_scenario(const Scenario& scenario);

/// Theorem constants on the given snapshots, with the scenario's overrides
/// or certified defaults for K, K1, K2.
TheoremConstants scenario_constants(const Scenario& scenario, std::span<const DiscreteManifold> snapshots,
                                    const CutoffProfile& chi, std::span<const double> u0, std::span<const double> v0);

RunResult run_scenario(const Scenario& scenario);

inline const char* kCsvHeader =
    "t,max_chi2t_grad_u2,bound_u,margin_u,max_chi2t_grad_v2,bound_v,margin_v,min_u,min_v,metric_min_eig";
inline const char* kReportSchema = "bernstein-report/1";

std::string diagnostics_csv(const TheoremReport& report, const Trajectory& trajectory);
nlohmann::json constants_json(const TheoremConstants& constants);
nlohmann::json report_to_json(const Scenario& scenario, const TheoremReport& report, const AuxReport& aux,
                              const Trajectory& trajectory);

/// Writes `<name>.report.json` and `<name>.csv` into `directory`.
void write_artifacts(const std::string& directory, const std::string& name, const nlohmann::json& report,
                     const std::string& csv);

/// Output directory: $BERNSTEIN_OUTPUT_DIR if set, else the scenario's.
std::string output_directory(const Scenario& scenario);

}  // namespace bernstein
