#pragma once

#include "bernstein/constants.hpp"
#include "bernstein/dynamics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bernstein {

enum class Verdict { verified, hypothesis_violated, bound_violated };
std::string to_string(Verdict verdict);

/// Least-squares slope of log(value) against log(spacing) over dyadic levels.
struct ConvergenceTrend {
    std::vector<int> levels;  // resolutions
    std::vector<double> spacings;
    std::vector<double> values;
    double fitted_order = 0.0;
    bool all_zero = false;   // every value exactly zero (order reported as +inf)
    bool monotone = false;   // values non-increasing under refinement
};

ConvergenceTrend fit_convergence(std::vector<int> levels, std::vector<double> spacings, std::vector<double> values);

/// Evaluates `measure(level)` at each level (>= 3, each double the last) and
/// fits the order. `spacing(level)` maps a level to its grid spacing.
ConvergenceTrend run_convergence_study(const std::vector<int>& levels, const std::function<double(int)>& spacing,
                                       const std::function<double(int)>& measure);

/// Relative margin observed / bound - 1 with the degenerate cases spelled
/// out: a non-positive bound gives -1 if nothing was observed, +inf otherwise.
double relative_margin(double observed, double bound);

struct BoundSeries {
    std::vector<double> t;
    std::vector<double> observed_u;
    std::vector<double> observed_v;
    std::vector<double> margin_u;
    std::vector<double> margin_v;
    std::vector<char> in_window;
};

struct TheoremReport {
    TheoremId theorem = TheoremId::T1;
    TheoremConstants constants;
    std::vector<GateCheck> gates;  // constants' gates plus trajectory checks
    BoundSeries series;
    double bound_u = 0.0;
    double bound_v = 0.0;
    double worst_margin_u = -1.0;
    double worst_margin_v = -1.0;
    double worst_margin = -1.0;
    double worst_margin_time = 0.0;
    double window_end = 0.0;     // claims restricted to [0, window_end]
    bool window_restricted = false;
    double slack = 0.05;
    Verdict verdict = Verdict::verified;
    std::optional<ConvergenceTrend> margin_trend;
    std::vector<std::string> notes;

    bool blocking_gates_pass() const;
};

inline constexpr double kDefaultSlack = 0.05;

/// Throws InvalidInput unless the trajectory's system and flow match the
/// theorem (T1 linear/static, T2 exponential/static, T3 linear/local Ricci,
/// T4 exponential/local Ricci).
void require_matching_configuration(TheoremId theorem, const Trajectory& trajectory);

/// Compares max over Omega of chi^2 t |grad u|^2 (and the v analogue) with
/// the theorem's bound at every recorded step inside the hypothesis window.
TheoremReport check_bernstein(const Trajectory& trajectory, const TheoremConstants& constants,
                              double slack = kDefaultSlack);

/// Budget c1 h^2 + c2 dt^2 for finite-differenced (d/dt - chi^2 Delta_f) G.
struct AuxBudget {
    double c1 = 0.0;
    double c2 = 0.0;
    double operator()(double h, double dt) const { return c1 * h * h + c2 * dt * dt; }
};

/// Calibrates the budget on the Fourier-mode solution of the linear system
/// on the flat torus (chi = 1, f = 0): the discrete operator applied to the
/// sampled closed form is compared with the closed-form value of
/// (d/dt - Delta) G. A safety factor of 4 is applied.
AuxBudget calibrate_aux_budget();

struct AuxReport {
    double boundary_max = 0.0;  // t = 0 slice over Omega, and the lateral boundary
    double interior_max = 0.0;
    double interior_max_time = 0.0;
    int interior_max_node = -1;
    bool max_principle_holds = false;
    double slack = 0.02;

    AuxBudget budget;
    double spacing = 0.0;
    double snapshot_dt = 0.0;
    int sampled_points = 0;
    int within_budget = 0;
    double fraction_within = 0.0;
    double worst_excess = 0.0;  // max of L - budget
    double required_fraction = 0.99;
    bool sign_holds = false;

    bool passed() const { return max_principle_holds && sign_holds; }
};

/// G = chi^2 t |grad u|^2 + (c0 T + 1/2) u^2 + T w v^2 with c0 the theorem's
/// Phi_0/Psi_0/Lambda_0/Gamma_0 and w = 1 (linear) or b2^2 (exponential).
std::vector<double> aux_function(const DiscreteManifold& manifold, const CutoffProfile& chi,
                                 const TheoremConstants& constants, const Snapshot& snapshot);

AuxReport check_aux_function(const Trajectory& trajectory, const CutoffProfile& chi,
                             const TheoremConstants& constants, double slack = 0.02,
                             std::optional<AuxBudget> budget = std::nullopt);

}  // namespace bernstein
