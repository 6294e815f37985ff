#include "generators.hpp"

#include "bernstein/cutoff.hpp"
#include "bernstein/error.hpp"
#include "bernstein/manifold.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bernstein;

namespace {

constexpr double kPi = std::numbers::pi;

DiscreteManifold make_torus(int n) {
    ManifoldDescription d;
    d.resolution = {n, n};
    return build_manifold(d);
}

DiscreteManifold make_sphere(int n, double r) {
    ManifoldDescription d;
    d.kind = ManifoldKind::sphere;
    d.resolution = {n, 2 * n};
    d.radius = r;
    return build_manifold(d);
}

double sup_error(std::span<const double> a, std::span<const double> b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

}  // namespace

TEST_CASE("tensor2 algebra") {
    const Sym2 g{2.0, 0.5, 1.0};
    const Sym2 gi = inverse(g);
    CHECK(gi.a00 * g.a00 + gi.a01 * g.a01 == doctest::Approx(1.0));
    CHECK(gi.a00 * g.a01 + gi.a01 * g.a11 == doctest::Approx(0.0));
    CHECK(min_eigenvalue(Sym2{3.0, 0.0, 1.0}) == doctest::Approx(1.0));
    // g^{-1} t = diag(1/2, 3) for t = diag(1, 3), g = diag(2, 1)
    CHECK(min_generalized_eigenvalue(Sym2{1.0, 0.0, 3.0}, Sym2{2.0, 0.0, 1.0}) == doctest::Approx(0.5));
    CHECK(norm_squared(Sym2{1.0, 0.0, 1.0}, Sym2{1.0, 2.0, 3.0}) == doctest::Approx(1.0 + 8.0 + 9.0));
    CHECK(trace(Sym2{1.0, 0.0, 1.0}, Sym2{1.0, 2.0, 3.0}) == doctest::Approx(4.0));
}

TEST_CASE("torus laplacian of cos x converges at second order") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const auto m = make_torus(n);
        std::vector<double> u(m.node_count()), exact(m.node_count());
        for (int p = 0; p < m.node_count(); ++p) {
            u[p] = std::cos(m.geometry().coords[p].c0);
            exact[p] = -u[p];
        }
        const double err = sup_error(apply_difference(m.geometry().lap0, u), exact);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("sphere laplacian of the height function") {
    // Lap z = -2 z / R^2
    const double r = 2.0;
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
        const auto m = make_sphere(n, r);
        std::vector<double> z(m.node_count()), exact(m.node_count());
        for (int p = 0; p < m.node_count(); ++p) {
            z[p] = r * std::cos(m.geometry().coords[p].c0);
            exact[p] = -2.0 * z[p] / (r * r);
        }
        const double err = sup_error(apply_difference(m.geometry().lap0, z), exact);
        if (prev > 0.0) CHECK(prev / err > 3.5);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("sphere curvature is 1/R^2") {
    const auto m = make_sphere(16, 2.0);
    for (double k : m.curvature().gaussian) CHECK(k == doctest::Approx(0.25).epsilon(1e-12));
    // m = 4, f = 0: Bakry-Emery tensor equals Ric, positive, so K = 0
    CHECK(m.curvature().lower_bound == 0.0);
}

TEST_CASE("flat torus has zero curvature and identity metric") {
    const auto m = make_torus(16);
    CHECK(m.curvature().lower_bound == 0.0);
    CHECK(m.metric_min_eigenvalue() == doctest::Approx(1.0));
    for (int p = 0; p < m.node_count(); p += 17) {
        const Christoffel c = m.christoffel(p);
        CHECK(c[0].a00 == 0.0);
        CHECK(c[1].a11 == 0.0);
    }
}

TEST_CASE("conformal factor scales the metric and curvature") {
    const auto m = make_torus(16);
    const auto scaled = m.with_conformal_factor(std::vector<double>(m.node_count(), std::log(2.0)), 0.5);
    CHECK(scaled.time() == 0.5);
    CHECK(scaled.metric(3).a00 == doctest::Approx(4.0));
    CHECK(scaled.inverse_metric(3).a11 == doctest::Approx(0.25));
    const auto sphere = make_sphere(16, 1.0);
    const auto bigger = sphere.with_conformal_factor(std::vector<double>(sphere.node_count(), std::log(2.0)), 0.0);
    for (double k : bigger.curvature().gaussian) CHECK(k == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("difference operators annihilate constants exactly") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = build_manifold(rng.manifold());
        const std::vector<double> c(m.node_count(), rng.uniform(-5.0, 5.0));
        const Geometry& g = m.geometry();
        for (const SparseOp* op : {&g.d0, &g.d1, &g.d00, &g.d11, &g.d01, &g.lap0, &g.lap0_f}) {
            for (double x : apply_difference(*op, c)) REQUIRE(x == 0.0);
        }
    }
}

TEST_CASE("weight certification holds for random catalog weights") {
    gen::Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = rng.manifold();
        const auto m = build_manifold(d);
        const WeightBounds analytic = analytic_weight_bounds(d.weight, d.kind, d.radius);
        const WeightBounds seen = measure_weight_bounds(m);
        CHECK(seen.gradient <= analytic.gradient + 1e-10);
        CHECK(seen.hessian <= analytic.hessian + 1e-10);
    }
}

TEST_CASE("sine weight bounds are the closed forms") {
    WeightSpec w;
    w.kind = WeightKind::sine;
    w.amplitude = 0.5;
    w.wavenumber = 2.0;
    const WeightBounds b = analytic_weight_bounds(w, ManifoldKind::torus, 1.0);
    CHECK(b.gradient == doctest::Approx(1.0));
    CHECK(b.hessian == doctest::Approx(2.0));
}

TEST_CASE("invalid manifold descriptions are rejected") {
    ManifoldDescription d;
    d.resolution = {4, 4};
    CHECK_THROWS_AS(build_manifold(d), InvalidInput);
    d.resolution = {16, 16};
    d.synthetic_dimension = 2.0;
    CHECK_THROWS_AS(build_manifold(d), InvalidInput);
    d.synthetic_dimension = 4.0;
    d.weight.kind = WeightKind::linear;
    d.weight.amplitude = 1.0;
    CHECK_THROWS_AS(build_manifold(d), InvalidInput);
    ManifoldDescription s;
    s.kind = ManifoldKind::sphere;
    s.resolution = {16, 31};
    CHECK_THROWS_AS(build_manifold(s), InvalidInput);
    CHECK_THROWS_AS(parse_manifold_kind("klein-bottle"), InvalidInput);
}

TEST_CASE("ring graph laplacian matches the grid second difference") {
    ManifoldDescription d;
    d.kind = ManifoldKind::weighted_graph;
    d.graph.nodes = 32;
    d.synthetic_dimension = 2.0;
    const auto m = build_manifold(d);
    const double h = 2.0 * kPi / 32;
    std::vector<double> u(32);
    for (int i = 0; i < 32; ++i) u[i] = std::sin(i * h);
    const auto lap = apply_difference(m.geometry().lap0_f, u);
    const double mu = (2.0 - 2.0 * std::cos(h)) / (h * h);
    for (int i = 0; i < 32; ++i) CHECK(lap[i] == doctest::Approx(-mu * u[i]).epsilon(1e-9));
}

TEST_CASE("local Ricci flow shrinks the round sphere like r^2 = R^2 - 2t") {
    auto m = make_sphere(16, 2.0);
    const auto chi = build_cutoff(m, {});
    const double dt = 1e-3;
    for (int k = 0; k < 250; ++k) m = evolve_metric(m, chi, dt);
    CHECK(m.time() == doctest::Approx(0.25));
    for (double phi : m.conformal_factor()) {
        CHECK(4.0 * std::exp(2.0 * phi) == doctest::Approx(4.0 - 0.5).epsilon(1e-6));
    }
}

TEST_CASE("local Ricci flow leaves the metric outside the cutoff untouched") {
    auto m = make_sphere(16, 2.0);
    CutoffDescription cd;
    cd.region = CutoffRegion::ball;
    cd.center = {0.0, 0.0};
    cd.radius = 1.5;
    const auto chi = build_cutoff(m, cd);
    for (int k = 0; k < 50; ++k) m = evolve_metric(m, chi, 1e-3);
    int outside = 0, moved = 0;
    for (int p = 0; p < m.node_count(); ++p) {
        if (chi.values()[p] == 0.0) {
            ++outside;
            CHECK(m.conformal_factor()[p] == 0.0);
        } else if (m.conformal_factor()[p] != 0.0) {
            ++moved;
        }
    }
    CHECK(outside > 0);
    CHECK(moved > 0);
}

TEST_CASE("a collapsing flow raises MetricDegeneration") {
    auto m = make_sphere(8, 0.5);
    const auto chi = build_cutoff(m, {});
    // r^2 = 0.25 - 2t vanishes at t = 0.125
    CHECK_THROWS_AS(
        [&] {
            for (int k = 0; k < 200; ++k) m = evolve_metric(m, chi, 1e-3);
        }(),
        MetricDegeneration);
}

TEST_CASE("sine weight on the torus: K1 = 1, Hessian bound 1, Bakry-Emery K = 1") {
    // Ric_f^{m-n} = diag(-sin x - cos^2 x / 2, 0) for f = sin x, m = 4; its
    // smallest eigenvalue s^2/2 - s - 1/2 (s = sin x) is -1 at x = pi/2.
    ManifoldDescription d;
    d.resolution = {64, 64};
    d.weight.kind = WeightKind::sine;
    d.weight.amplitude = 1.0;
    const auto m = build_manifold(d);
    CHECK(m.weight_bounds().gradient == doctest::Approx(1.0));
    CHECK(m.weight_bounds().hessian == doctest::Approx(1.0));
    CHECK(m.curvature().lower_bound == doctest::Approx(1.0).epsilon(1e-12));
    double sweep = 0.0;
    for (int p = 0; p < m.node_count(); ++p) {
        const double s = std::sin(m.geometry().coords[p].c0);
        sweep = std::min({sweep, 0.5 * s * s - s - 0.5, 0.0});
    }
    CHECK(m.curvature().lower_bound == doctest::Approx(-sweep).epsilon(1e-12));
}

TEST_CASE("flat torus metric is a fixed point of the flow") {
    auto m = make_torus(16);
    CutoffDescription cd;
    cd.region = CutoffRegion::ball;
    cd.center = {kPi, kPi};
    cd.radius = 2.0;
    const auto chi = build_cutoff(m, cd);
    for (int k = 0; k < 20; ++k) m = evolve_metric(m, chi, 1e-2);
    for (double phi : m.conformal_factor()) CHECK(phi == 0.0);
}

TEST_CASE("curvature of the evolved round sphere stays 1/r^2(t)") {
    for (int n : {8, 16, 32}) {
        auto m = make_sphere(n, 2.0);
        const auto chi = build_cutoff(m, {});
        for (int k = 0; k < 100; ++k) m = evolve_metric(m, chi, 5e-3);
        const double expect = 1.0 / (4.0 - 2.0 * 0.5);
        for (double k : m.curvature().gaussian) CHECK(k == doctest::Approx(expect).epsilon(1e-9));
    }
}
