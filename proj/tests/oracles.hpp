#pragma once

// Closed forms computed independently of the library. Frozen values below
// were produced from these formulas and are compared against, never
// regenerated by, the code under test.

#include <cmath>

namespace oracle {

// Linear system u_t = Lap u - v, v_t = Lap v - u on the flat torus with
// u0 = 1 + cos(x)/2, v0 = 1. Mean mode: u = v = e^{-t}. cos mode:
// (a + c)' = -2(a + c), (a - c)' = 0.
inline double linear_torus_u(double t, double x) {
    return std::exp(-t) + 0.25 * (std::exp(-2.0 * t) + 1.0) * std::cos(x);
}
inline double linear_torus_v(double t, double x) {
    return std::exp(-t) + 0.25 * (std::exp(-2.0 * t) - 1.0) * std::cos(x);
}
// The semi-discrete version on an N-point grid replaces the eigenvalue -1 of
// cos x by -(2 - 2 cos h) / h^2.
inline double linear_torus_u_discrete(double t, double x, double h) {
    const double mu = (2.0 - 2.0 * std::cos(h)) / (h * h);
    return std::exp(-t) + 0.25 * (std::exp(-(mu + 1.0) * t) + std::exp(-(mu - 1.0) * t)) * std::cos(x);
}

inline constexpr double kLinearTorusUAtOrigin = 0.6517132619805955;  // u(t = 1, x = 0)

// Ricci flow of a round 2-sphere: d(r^2)/dt = -2.
inline double ricci_sphere_radius_squared(double r0, double t) { return r0 * r0 - 2.0 * t; }

// u' = -e^u from u(0) = u0 (exponential system with a = b = -1, u = v):
// e^{-u} = e^{-u0} + t, so u reaches 0 at t = 1 - e^{-u0}.
inline double exponential_zero_time(double u0) { return 1.0 - std::exp(-u0); }

// Constants for chi = 1, f = 0, K = 0 (only the 1/4 or xi^2/4 term survives).
inline constexpr double kPhi0 = 0.25;
inline constexpr double kLambda0 = 8.25;  // 8 chi^2 + 1/4
inline double gamma0(double xi) { return xi * xi / 4.0; }

// Bound (c T + 1/2) max_own + T w max_other.
inline double bound(double c, double T, double own, double other, double w = 1.0) {
    return (c * T + 0.5) * own + T * w * other;
}

inline constexpr double kB1Reference = 2.125;            // Phi0 = 1/4, T = 1, max u0 = 3/2, max v0 = 1
inline constexpr double kAuxBoundaryReference = 2.6875;  // 3/4 * (3/2)^2 + 1
inline constexpr double kC1Reference = 8.139056098930649;  // 3/4 + e^2

// Complete graph K_N with unit weights: CD(1 + N/2, infinity).
inline double complete_graph_curvature(int n) { return 1.0 + n / 2.0; }

}  // namespace oracle
