#pragma once

#include "bernstein/cutoff.hpp"
#include "bernstein/manifold.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bernstein {

enum class TheoremId { T1, T2, T3, T4 };

std::string to_string(TheoremId id);
TheoremId parse_theorem(std::string_view text);

/// T2 and T4 concern the exponential system.
inline bool is_exponential(TheoremId id) { return id == TheoremId::T2 || id == TheoremId::T4; }
/// T3 and T4 concern the locally Ricci-flowing metric.
inline bool is_evolving(TheoremId id) { return id == TheoremId::T3 || id == TheoremId::T4; }

struct GateCheck {
    std::string name;
    bool passed = true;
    std::string detail;
    int witness_node = -1;
    double witness_time = 0.0;
    bool blocking = true;  // false: the claim is restricted instead of refused
};

struct ConstantInputs {
    double m = 0.0;
    int n = 0;
    double K = 0.0;          // Bakry-Emery bound (T1, T2); trailing K of Gamma (T4)
    double K1 = 0.0;         // |grad f| <= K1 (T3, T4)
    double K2 = 0.0;         // Hess f >= -K2 g (T3, T4)
    double a = 0.0;
    double b = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double T = 0.0;
    double u0_max = 0.0;
    double v0_max = 0.0;
};

/// Constants of one theorem. For T1/T3 the u and v fields coincide; for
/// T2/T4 the u field uses xi = a and the v field xi = b.
struct TheoremConstants {
    TheoremId theorem = TheoremId::T1;
    ConstantInputs inputs;
    std::vector<double> field_u;  // Phi, Psi(a), Lambda, Gamma(a) on the first snapshot
    std::vector<double> field_v;  // Phi, Psi(b), Lambda, Gamma(b)
    double max_u = 0.0;           // Phi_0, Psi_0(K,a), Lambda_0, Gamma_0(a): max over Omega and snapshots
    double max_v = 0.0;
    double bound_u = 0.0;         // B1, C1, D1, E1
    double bound_v = 0.0;         // B2, C2, D2, E2
    std::vector<GateCheck> gates;
    std::vector<std::string> notes;

    bool gates_pass() const;
    /// Name of the constant family ("Phi", "Psi", "Lambda", "Gamma").
    std::string field_name() const;
    std::string bound_name(int which) const;  // 1 or 2
};

/// Phi = 8m|grad chi|^2 - chi Delta_f chi + 7|grad chi|^2 + 1/4 + K.
TheoremConstants phi_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K,
                               double T, double u0_max, double v0_max);
/// Psi(xi) = 8m|grad chi|^2 - chi Delta_f chi + 7|grad chi|^2 + xi^2/4 + K.
TheoremConstants psi_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K,
                               double a, double b, double b1, double b2, double T, double u0_max, double v0_max);
/// Lambda = K2 chi^2 + 8m|grad chi|^2 + chi^2 K1/(m-n) + 8 chi^2
///          - (chi Delta chi + |grad chi|^2) + 1/4 + chi |grad chi| K1.
TheoremConstants lambda_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K1,
                                  double K2, double T, double u0_max, double v0_max);
/// Gamma(xi) = K2 chi^2 + 8m|grad chi|^2 + chi^2 K1^2/(m-n) - chi Delta chi
///             + 7|grad chi|^2 + chi |grad chi| K1 + xi^2/4 + K.
TheoremConstants gamma_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K1,
                                 double K2, double a, double b, double b1, double b2, double T, double u0_max,
                                 double v0_max, double K = 0.0);

/// Bound constant (c T + 1/2) own_max + T w other_max.
inline double bound_constant(double c, double T, double own_max, double other_max, double weight = 1.0) {
    return (c * T + 0.5) * own_max + T * weight * other_max;
}

/// max over Omega of a node field.
double max_over_region(std::span<const double> field, std::span<const char> region);

/// Gates on the initial data: u0, v0 >= 0 and, for T2/T4, u0 <= ln b1,
/// v0 <= ln b2. Appended to `constants.gates`.
void add_initial_data_gates(TheoremConstants& constants, std::span<const double> u0, std::span<const double> v0);

}  // namespace bernstein
