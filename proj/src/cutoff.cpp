#include "bernstein/cutoff.hpp"

#include "bernstein/error.hpp"
#include "bernstein/graph_curvature.hpp"

#include <algorithm>
#include <cmath>

namespace bernstein {
namespace {

constexpr double kPi = std::numbers::pi;

double wrap_periodic(double d, double period) { return d - period * std::round(d / period); }

// Radial profile chi(r) with r the distance to the centre: value, chi'(r),
// chi''(r) and chi'(r)/r (finite at r = 0 for a ball).
struct Radial {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d1_over_r = 0.0;
    bool inside = false;
};

Radial radial_profile(const CutoffDescription& d, double r) {
    Radial out;
    if (d.region == CutoffRegion::ball) {
        const double s = r / d.radius;
        out.inside = s <= 1.0;
        if (s >= 1.0) return out;
        const BumpSample b = polynomial_bump(s, d.degree);
        out.value = b.value;
        out.d1 = b.d1 / d.radius;
        out.d2 = b.d2 / (d.radius * d.radius);
        out.d1_over_r = -2.0 * d.degree * std::pow(1.0 - s * s, d.degree - 1) / (d.radius * d.radius);
    } else {
        const double mid = 0.5 * (d.radius + d.inner_radius);
        const double half = 0.5 * (d.radius - d.inner_radius);
        const double s = (r - mid) / half;
        out.inside = std::abs(s) <= 1.0;
        if (std::abs(s) >= 1.0) return out;
        const BumpSample b = polynomial_bump(s, d.degree);
        out.value = b.value;
        out.d1 = b.d1 / half;
        out.d2 = b.d2 / (half * half);
        out.d1_over_r = out.d1 / r;
    }
    return out;
}

void validate(const DiscreteManifold& man, const CutoffDescription& d) {
    if (d.degree < 3) throw InvalidInput("cutoff degree must be at least 3 for a C^2 profile");
    if (d.region == CutoffRegion::whole) {
        if (!man.is_closed()) throw InvalidInput("a whole-manifold cutoff needs a closed manifold");
        return;
    }
    if (!(d.radius > 0.0)) throw InvalidInput("cutoff radius must be positive");
    if (d.region == CutoffRegion::annulus && !(d.inner_radius > 0.0 && d.inner_radius < d.radius)) {
        throw InvalidInput("annulus needs 0 < inner_radius < radius");
    }
    const Geometry& g = man.geometry();
    switch (g.kind) {
        case ManifoldKind::torus:
            if (d.radius >= 0.5 * g.side) throw InvalidInput("cutoff radius must be below half the torus period");
            break;
        case ManifoldKind::flat_patch: {
            const double half = 0.5 * g.side;
            if (std::abs(d.center.c0) + d.radius >= half || std::abs(d.center.c1) + d.radius >= half) {
                throw InvalidInput("cutoff support touches the patch boundary");
            }
            break;
        }
        case ManifoldKind::sphere:
            if (d.radius >= kPi * g.radius) throw InvalidInput("cutoff radius must be below the antipodal distance");
            break;
        case ManifoldKind::weighted_graph:
            if (d.radius >= 0.5 * g.side) throw InvalidInput("cutoff radius must be below half the ring length");
            break;
    }
}

}  // namespace

std::string to_string(CutoffRegion region) {
    switch (region) {
        case CutoffRegion::whole: return "whole";
        case CutoffRegion::ball: return "ball";
        case CutoffRegion::annulus: return "annulus";
    }
    return "?";
}

CutoffRegion parse_cutoff_region(std::string_view text) {
    if (text == "whole") return CutoffRegion::whole;
    if (text == "ball") return CutoffRegion::ball;
    if (text == "annulus") return CutoffRegion::annulus;
    throw InvalidInput("unknown cutoff region '" + std::string(text) + "'");
}

BumpSample polynomial_bump(double s, int p) {
    if (std::abs(s) >= 1.0) return {};
    const double q = 1.0 - s * s;
    const double qp2 = p >= 2 ? std::pow(q, p - 2) : 0.0;
    return {std::pow(q, p), -2.0 * p * s * std::pow(q, p - 1), -2.0 * p * std::pow(q, p - 1) + 4.0 * p * (p - 1) * s * s * qp2};
}

CutoffProfile::CutoffProfile(CutoffDescription description, std::vector<double> values, std::vector<Vec2> partials,
                             std::vector<double> background_laplacian, std::vector<char> region,
                             std::vector<char> boundary)
    : description_(description),
      values_(std::move(values)),
      partials_(std::move(partials)),
      background_laplacian_(std::move(background_laplacian)),
      region_(std::move(region)),
      boundary_(std::move(boundary)) {}

double CutoffProfile::max_value() const {
    double out = 0.0;
    for (double v : values_) out = std::max(out, v);
    return out;
}

std::vector<double> CutoffProfile::gradient_norm_squared(const DiscreteManifold& man) const {
    if (man.is_graph()) return graph_gamma(man.geometry(), values_);
    const int n = man.node_count();
    std::vector<double> out(n);
    for (int p = 0; p < n; ++p) out[p] = contract(man.inverse_metric(p), partials_[p], partials_[p]);
    return out;
}

std::vector<double> CutoffProfile::laplacian(const DiscreteManifold& man) const {
    const int n = man.node_count();
    std::vector<double> out(n);
    if (man.is_graph()) {
        return apply_difference(man.geometry().lap0, values_);
    }
    const auto s = man.inverse_scale();
    for (int p = 0; p < n; ++p) out[p] = s[p] * background_laplacian_[p];
    return out;
}

std::vector<double> CutoffProfile::weighted_laplacian(const DiscreteManifold& man) const {
    const int n = man.node_count();
    std::vector<double> out(n);
    if (man.is_graph()) {
        return apply_difference(man.geometry().lap0_f, values_);
    }
    out = laplacian(man);
    for (int p = 0; p < n; ++p) out[p] -= contract(man.inverse_metric(p), man.weight_gradient(p), partials_[p]);
    return out;
}

CutoffProfile build_cutoff(const DiscreteManifold& man, const CutoffDescription& d) {
    validate(man, d);
    const Geometry& g = man.geometry();
    const int n = g.node_count;
    std::vector<double> values(n, 0.0);
    std::vector<Vec2> partials(n);
    std::vector<double> lap(n, 0.0);
    std::vector<char> region(n, 0);
    std::vector<char> boundary(n, 0);

    if (d.region == CutoffRegion::whole) {
        std::fill(values.begin(), values.end(), 1.0);
        std::fill(region.begin(), region.end(), 1);
        return CutoffProfile(d, std::move(values), std::move(partials), std::move(lap), std::move(region),
                             std::move(boundary));
    }

    for (int p = 0; p < n; ++p) {
        const Vec2 q = g.coords[p];
        if (g.kind == ManifoldKind::sphere) {
            const double R = g.radius;
            const double st = std::sin(q.c0), ct = std::cos(q.c0);
            const double sc = std::sin(d.center.c0), cc = std::cos(d.center.c0);
            const double dphi = q.c1 - d.center.c1;
            const double dot = ct * cc + st * sc * std::cos(dphi);
            // |p x c| for unit vectors p, c.
            const double cx = st * std::sin(q.c1) * cc - ct * sc * std::sin(d.center.c1);
            const double cy = ct * sc * std::cos(d.center.c1) - st * std::cos(q.c1) * cc;
            const double cz = st * sc * std::sin(dphi);
            const double sin_gamma = std::sqrt(cx * cx + cy * cy + cz * cz);
            const double gamma = std::atan2(sin_gamma, dot);
            const Radial r = radial_profile(d, R * gamma);
            region[p] = r.inside;
            if (r.value == 0.0 && r.d1 == 0.0) continue;
            // gamma * d(gamma)/dq, regular at the centre.
            const double ratio = sin_gamma > 1e-12 ? gamma / sin_gamma : 1.0;
            const Vec2 gdg{ratio * (st * cc - ct * sc * std::cos(dphi)), ratio * st * sc * std::sin(dphi)};
            const double gamma_cot = sin_gamma > 1e-12 ? gamma * dot / sin_gamma : 1.0;
            values[p] = r.value;
            partials[p] = (r.d1_over_r * R * R) * gdg;
            lap[p] = r.d2 + r.d1_over_r * gamma_cot;
        } else if (g.is_graph()) {
            const double dist = std::abs(wrap_periodic(q.c0 - d.center.c0, g.side));
            const Radial r = radial_profile(d, dist);
            region[p] = r.inside;
            values[p] = r.value;
        } else {
            double dx = q.c0 - d.center.c0;
            double dy = q.c1 - d.center.c1;
            if (g.kind == ManifoldKind::torus) {
                dx = wrap_periodic(dx, g.side);
                dy = wrap_periodic(dy, g.side);
            }
            const Radial r = radial_profile(d, std::sqrt(dx * dx + dy * dy));
            region[p] = r.inside;
            values[p] = r.value;
            partials[p] = {r.d1_over_r * dx, r.d1_over_r * dy};
            lap[p] = r.d2 + r.d1_over_r;
        }
    }

    for (int p = 0; p < n; ++p) {
        if (!region[p]) continue;
        if (g.is_graph()) {
            for (const auto& [y, w] : g.adjacency[p]) {
                if (!region[y]) boundary[p] = 1;
            }
        } else {
            for (int q : g.neighbors[p]) {
                if (q < 0 || !region[q]) boundary[p] = 1;
            }
        }
    }
    return CutoffProfile(d, std::move(values), std::move(partials), std::move(lap), std::move(region),
                         std::move(boundary));
}

}  // namespace bernstein
