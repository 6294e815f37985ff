#pragma once

#include <algorithm>
#include <cmath>

namespace bernstein {

/// Components of a 1-form (or a vector, depending on context) in the two
/// grid coordinates.
struct Vec2 {
    double c0 = 0.0;
    double c1 = 0.0;
};

/// Symmetric 2x2 tensor stored by its independent components.
struct Sym2 {
    double a00 = 0.0;
    double a01 = 0.0;
    double a11 = 0.0;
};

inline Vec2 operator+(Vec2 x, Vec2 y) { return {x.c0 + y.c0, x.c1 + y.c1}; }
inline Vec2 operator-(Vec2 x, Vec2 y) { return {x.c0 - y.c0, x.c1 - y.c1}; }
inline Vec2 operator*(double s, Vec2 x) { return {s * x.c0, s * x.c1}; }

inline Sym2 operator+(Sym2 x, Sym2 y) { return {x.a00 + y.a00, x.a01 + y.a01, x.a11 + y.a11}; }
inline Sym2 operator-(Sym2 x, Sym2 y) { return {x.a00 - y.a00, x.a01 - y.a01, x.a11 - y.a11}; }
inline Sym2 operator*(double s, Sym2 x) { return {s * x.a00, s * x.a01, s * x.a11}; }

inline double det(Sym2 x) { return x.a00 * x.a11 - x.a01 * x.a01; }

inline Sym2 inverse(Sym2 x) {
    const double d = det(x);
    return {x.a11 / d, -x.a01 / d, x.a00 / d};
}

/// Symmetric outer product w (x) w.
inline Sym2 outer(Vec2 w) { return {w.c0 * w.c0, w.c0 * w.c1, w.c1 * w.c1}; }

/// Raise an index: (inv)^{ij} w_j.
inline Vec2 raise(Sym2 inv, Vec2 w) {
    return {inv.a00 * w.c0 + inv.a01 * w.c1, inv.a01 * w.c0 + inv.a11 * w.c1};
}

/// Bilinear form t(x, y) = t_ij x^i y^j.
inline double apply(Sym2 t, Vec2 x, Vec2 y) {
    return t.a00 * x.c0 * y.c0 + t.a01 * (x.c0 * y.c1 + x.c1 * y.c0) + t.a11 * x.c1 * y.c1;
}

/// Inner product of two 1-forms through an inverse metric.
inline double contract(Sym2 inv, Vec2 a, Vec2 b) { return apply(inv, a, b); }

/// g^{ij} t_ij
inline double trace(Sym2 inv, Sym2 t) { return inv.a00 * t.a00 + 2.0 * inv.a01 * t.a01 + inv.a11 * t.a11; }

/// |t|^2 = g^{ik} g^{jl} t_ij t_kl
inline double norm_squared(Sym2 inv, Sym2 t) {
    // M = G T (not symmetric in general); |t|^2 = tr(M M)
    const double m00 = inv.a00 * t.a00 + inv.a01 * t.a01;
    const double m01 = inv.a00 * t.a01 + inv.a01 * t.a11;
    const double m10 = inv.a01 * t.a00 + inv.a11 * t.a01;
    const double m11 = inv.a01 * t.a01 + inv.a11 * t.a11;
    return m00 * m00 + 2.0 * m01 * m10 + m11 * m11;
}

inline double min_eigenvalue(Sym2 x) {
    const double mean = 0.5 * (x.a00 + x.a11);
    const double half = 0.5 * (x.a00 - x.a11);
    return mean - std::sqrt(half * half + x.a01 * x.a01);
}

/// Smallest root of det(t - lambda g) = 0 for SPD g, i.e. the smallest
/// eigenvalue of g^{-1} t.
inline double min_generalized_eigenvalue(Sym2 t, Sym2 g) {
    const double dg = det(g);
    const double tr = t.a00 * g.a11 + t.a11 * g.a00 - 2.0 * t.a01 * g.a01;
    const double dt = det(t);
    const double disc = std::max(tr * tr - 4.0 * dg * dt, 0.0);
    return (tr - std::sqrt(disc)) / (2.0 * dg);
}

}  // namespace bernstein
