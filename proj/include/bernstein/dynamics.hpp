#pragma once

#include "bernstein/cutoff.hpp"
#include "bernstein/manifold.hpp"

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bernstein {

enum class SystemKind { linear, exponential };
enum class Stepper { rk4, implicit_euler };
enum class Flow { none, local_ricci };

std::string to_string(SystemKind kind);
std::string to_string(Stepper stepper);
std::string to_string(Flow flow);
SystemKind parse_system_kind(std::string_view text);
Stepper parse_stepper(std::string_view text);
Flow parse_flow(std::string_view text);

/// The coupled pair
///   linear:       u_t = chi^2 Delta_f u - v,        v_t = chi^2 Delta_f v - u
///   exponential:  u_t = chi^2 Delta_f u + a e^v,    v_t = chi^2 Delta_f v + b e^u
struct SystemSpec {
    SystemKind kind = SystemKind::linear;
    double a = -1.0;
    double b = -1.0;
    // Caps u <= ln b1, v <= ln b2 monitored for the exponential system.
    double b1 = std::numeric_limits<double>::infinity();
    double b2 = std::numeric_limits<double>::infinity();
    std::vector<double> u0;
    std::vector<double> v0;
    double T = 1.0;
    Stepper stepper = Stepper::rk4;
    double cfl = 0.25;
    double dt = 0.0;  // 0: chosen from the stability policy
    int snapshots = 64;  // snapshot intervals over [0, T]
    bool stop_at_positivity_loss = false;
};

/// Source terms (lambda_1, lambda_2) and their partial derivatives.
struct Reaction {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double d1_du = 0.0;
    double d1_dv = 0.0;
};
Reaction reaction(const SystemSpec& spec, double u, double v);

struct SystemState {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> phi;  // conformal factor (all zero for static runs)
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> phi;
};

struct StepDiagnostics {
    double t = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double min_v = 0.0;
    double max_v = 0.0;
    double max_chi2t_grad_u2 = 0.0;  // max over Omega, metric at time t
    double max_chi2t_grad_v2 = 0.0;
    double metric_min_eig = 0.0;
};

/// Diagnostics of one state; |grad|^2 uses the state's own metric.
StepDiagnostics diagnose(const DiscreteManifold& background, const CutoffProfile& chi, const SystemState& state);

struct Trajectory {
    DiscreteManifold initial;  // metric at t = 0
    SystemSpec spec;
    Flow flow = Flow::none;
    std::vector<Snapshot> snapshots;
    std::vector<StepDiagnostics> diagnostics;  // t = 0 and every step
    double positivity_loss_time = std::numeric_limits<double>::infinity();
    double cap_violation_time = std::numeric_limits<double>::infinity();
    bool truncated = false;

    /// First time u, v >= 0 (or a cap) failed; +inf if they held throughout.
    double hypothesis_time() const;
    /// Metric snapshot belonging to snapshots[i].
    DiscreteManifold manifold_at(std::size_t i) const;
    std::vector<DiscreteManifold> snapshot_manifolds() const;
};

/// Largest explicit step: cfl * 8 / rho, rho the Gershgorin radius of the
/// diffusion operator chi^2 e^{-2 phi} Delta_f (and of the metric flow).
/// Equals cfl h^2 / max chi^2 on a uniform flat grid.
double stable_time_step(const DiscreteManifold& background, const CutoffProfile& chi, std::span<const double> phi,
                        double cfl, Flow flow);

/// One step of the coupled system (and of the metric when flowing).
SystemState step_system(const SystemState& state, const DiscreteManifold& background, const CutoffProfile& chi,
                        const SystemSpec& spec, Flow flow, double dt);

Trajectory solve_trajectory(const DiscreteManifold& manifold, const CutoffProfile& chi, const SystemSpec& spec,
                            Flow flow);

enum class FlowTensor { zero, local_ricci };

struct ResidualSeries {
    std::vector<double> times;
    std::vector<double> sup_residual;
    std::vector<double> sup_scale;  // sup of |lhs| + |rhs|

    double max_residual() const;
};

/// Residual of the evolution equation of chi^2 |grad u|^2 along a metric
/// moving by dg/dt = -2h:
///   (d/dt - chi^2 Delta_f)(chi^2 |grad u|^2)
///     = 2 chi^2 (h - chi^2 Ric)(grad u, grad u) - 2 chi^4 Hess f(grad u, grad u)
///       - 2 chi^4 |Hess u|^2 + 4 chi^3 Delta_f u <grad u, grad chi>
///       - 2 chi^2 |grad u|^2 (chi Delta_f chi + |grad chi|^2)
///       - 8 chi^3 Hess u(grad u, grad chi)
///       + 2 chi^2 (d lambda1/du |grad u|^2 + d lambda1/dv <grad u, grad v>).
/// The time derivative is a centred difference of neighbouring snapshots.
ResidualSeries lemma_evolution_residual(const Trajectory& trajectory, const CutoffProfile& chi, FlowTensor h);

}  // namespace bernstein
