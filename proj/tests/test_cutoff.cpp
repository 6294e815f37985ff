#include "bernstein/cutoff.hpp"
#include "bernstein/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

using namespace bernstein;

namespace {

DiscreteManifold torus(int n) {
    ManifoldDescription d;
    d.resolution = {n, n};
    return build_manifold(d);
}

CutoffDescription ball(double cx, double cy, double r) {
    CutoffDescription c;
    c.region = CutoffRegion::ball;
    c.center = {cx, cy};
    c.radius = r;
    return c;
}

}  // namespace

TEST_CASE("polynomial bump values") {
    CHECK(polynomial_bump(0.0, 3).value == 1.0);
    CHECK(polynomial_bump(1.0, 3).value == 0.0);
    CHECK(polynomial_bump(1.5, 3).value == 0.0);
    const auto b = polynomial_bump(0.5, 3);
    CHECK(b.value == doctest::Approx(0.421875));
    CHECK(b.d1 == doctest::Approx(3.0 * 0.5625 * -1.0));  // 3(1-s^2)^2 (-2s)
    CHECK(std::abs(polynomial_bump(0.99999, 3).d2) < 1e-3);
}

TEST_CASE("whole-manifold cutoff is identically one") {
    const auto m = torus(16);
    const auto chi = build_cutoff(m, {});
    CHECK(chi.whole_manifold());
    for (double c : chi.values()) CHECK(c == 1.0);
    for (double g : chi.gradient_norm_squared(m)) CHECK(g == 0.0);
    for (double l : chi.weighted_laplacian(m)) CHECK(l == 0.0);
    for (char b : chi.region_boundary()) CHECK(b == 0);
}

TEST_CASE("ball cutoff: support, region and boundary") {
    const double pi = std::numbers::pi;
    const auto m = torus(32);
    const auto chi = build_cutoff(m, ball(pi, pi, 1.5));
    CHECK(chi.max_value() <= 1.0);
    int inside = 0, boundary = 0;
    for (int p = 0; p < m.node_count(); ++p) {
        const Vec2 q = m.geometry().coords[p];
        const double r = std::hypot(q.c0 - pi, q.c1 - pi);
        if (r > 1.5) CHECK(chi.values()[p] == 0.0);
        if (chi.region()[p]) ++inside;
        if (chi.region_boundary()[p]) {
            ++boundary;
            CHECK(chi.region()[p]);
        }
    }
    CHECK(inside > 0);
    CHECK(boundary > 0);
    CHECK(boundary < inside);
}

TEST_CASE("cutoff partials match finite differences of the profile") {
    const double pi = std::numbers::pi;
    const auto m = torus(128);
    const auto chi = build_cutoff(m, ball(pi, pi, 2.0));
    const auto fd = apply_difference(m.geometry().d0, chi.values());
    double err = 0.0;
    for (int p = 0; p < m.node_count(); ++p) err = std::max(err, std::abs(fd[p] - chi.partials()[p].c0));
    CHECK(err < 5e-3);
}

TEST_CASE("ball cutoff wraps around the torus") {
    const auto m = torus(32);
    const auto chi = build_cutoff(m, ball(0.0, 0.0, 1.0));
    const int last = m.geometry().index(31, 0);
    CHECK(chi.values()[last] > 0.0);
    CHECK(chi.values()[last] == doctest::Approx(chi.values()[m.geometry().index(1, 0)]));
}

TEST_CASE("annulus cutoff vanishes at the centre") {
    const double pi = std::numbers::pi;
    const auto m = torus(64);
    CutoffDescription c = ball(pi, pi, 2.5);
    c.region = CutoffRegion::annulus;
    c.inner_radius = 1.0;
    const auto chi = build_cutoff(m, c);
    CHECK(chi.values()[m.geometry().index(32, 32)] == 0.0);
    CHECK(chi.max_value() > 0.9);
}

TEST_CASE("sphere cap cutoff uses geodesic distance") {
    ManifoldDescription d;
    d.kind = ManifoldKind::sphere;
    d.resolution = {16, 32};
    d.radius = 2.0;
    const auto m = build_manifold(d);
    const auto chi = build_cutoff(m, ball(0.0, 0.0, 2.0));
    for (int p = 0; p < m.node_count(); ++p) {
        const double r = 2.0 * m.geometry().coords[p].c0;  // geodesic distance from the north pole
        CHECK(chi.values()[p] == doctest::Approx(polynomial_bump(r / 2.0, 3).value));
    }
}

TEST_CASE("invalid cutoffs are rejected") {
    const auto m = torus(16);
    auto c = ball(1.0, 1.0, -1.0);
    CHECK_THROWS_AS(build_cutoff(m, c), InvalidInput);
    c = ball(1.0, 1.0, 1.0);
    c.degree = 2;
    CHECK_THROWS_AS(build_cutoff(m, c), InvalidInput);
    c.degree = 3;
    c.region = CutoffRegion::annulus;
    c.inner_radius = 2.0;
    CHECK_THROWS_AS(build_cutoff(m, c), InvalidInput);
}

TEST_CASE("unit bump on a flat patch: centre and edge values") {
    ManifoldDescription d;
    d.kind = ManifoldKind::flat_patch;
    d.resolution = {41, 41};
    d.side = 4.0;
    const auto m = build_manifold(d);
    const auto chi = build_cutoff(m, ball(0.0, 0.0, 1.0));
    const int centre = m.geometry().index(20, 20);
    CHECK(chi.values()[centre] == 1.0);
    CHECK(chi.gradient_norm_squared(m)[centre] == 0.0);
    CHECK(chi.background_laplacian()[centre] == doctest::Approx(-12.0));
    const int edge = m.geometry().index(30, 20);  // x = 1
    CHECK(chi.values()[edge] == 0.0);
    CHECK(chi.partials()[edge].c0 == 0.0);
}

TEST_CASE("a cutoff reaching the patch boundary is rejected") {
    ManifoldDescription d;
    d.kind = ManifoldKind::flat_patch;
    d.resolution = {33, 33};
    d.side = 4.0;
    const auto m = build_manifold(d);
    CHECK_THROWS_AS(build_cutoff(m, ball(1.5, 0.0, 1.0)), InvalidInput);
    CHECK_THROWS_AS(build_cutoff(m, {}), InvalidInput);
}

namespace {

// Sup-norm gap between the analytic derivatives of a bump and centred
// differences of its samples, at 32, 64, 128.
std::vector<std::pair<double, double>> derivative_gaps(int degree) {
    const double pi = std::numbers::pi;
    std::vector<std::pair<double, double>> out;
    for (int n : {32, 64, 128}) {
        const auto m = torus(n);
        auto c = ball(pi, pi, 2.0);
        c.degree = degree;
        const auto chi = build_cutoff(m, c);
        const auto d0 = apply_difference(m.geometry().d0, chi.values());
        const auto lap = apply_difference(m.geometry().lap0, chi.values());
        double eg = 0.0, el = 0.0;
        for (int p = 0; p < m.node_count(); ++p) {
            eg = std::max(eg, std::abs(d0[p] - chi.partials()[p].c0));
            el = std::max(el, std::abs(lap[p] - chi.background_laplacian()[p]));
        }
        out.emplace_back(eg, el);
    }
    return out;
}

}  // namespace

TEST_CASE("analytic bump derivatives agree with centred differences") {
    // Degree 3 is C^2 with a jump in the third derivative at the support
    // edge: the gradient gap is O(h^2), the Laplacian gap only O(h) there.
    const auto d3 = derivative_gaps(3);
    for (int k = 1; k < 3; ++k) {
        CHECK(d3[k - 1].first / d3[k].first > 3.0);
        CHECK(d3[k - 1].second / d3[k].second > 1.8);
    }
    const auto d4 = derivative_gaps(4);
    for (int k = 1; k < 3; ++k) CHECK(d4[k - 1].second / d4[k].second > 3.5);
}
