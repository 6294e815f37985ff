#include "generators.hpp"

#include "bernstein/calculus.hpp"
#include "bernstein/error.hpp"
#include "bernstein/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bernstein;

namespace {

DiscreteManifold torus(int n, double sine_amplitude = 0.0) {
    ManifoldDescription d;
    d.resolution = {n, n};
    if (sine_amplitude != 0.0) {
        d.weight.kind = WeightKind::sine;
        d.weight.amplitude = sine_amplitude;
    }
    return build_manifold(d);
}

ScalarField sample(const DiscreteManifold& m, double (*fn)(double, double)) {
    std::vector<double> v(m.node_count());
    for (int p = 0; p < m.node_count(); ++p) v[p] = fn(m.geometry().coords[p].c0, m.geometry().coords[p].c1);
    return ScalarField(m, v, "u");
}

double sup_abs(std::span<const double> v) {
    double e = 0.0;
    for (double x : v) e = std::max(e, std::abs(x));
    return e;
}

}  // namespace

TEST_CASE("gradient and Hessian of sin x cos y on the flat torus") {
    const auto m = torus(64);
    const auto u = sample(m, [](double x, double y) { return std::sin(x) * std::cos(y); });
    const auto g = gradient(m, u);
    const auto h = hessian(m, u);
    double eg = 0.0, eh = 0.0;
    for (int p = 0; p < m.node_count(); ++p) {
        const auto [x, y] = m.geometry().coords[p];
        eg = std::max(eg, std::abs(g.vector[p].c0 - std::cos(x) * std::cos(y)));
        eh = std::max(eh, std::abs(h.components[p].a01 + std::cos(x) * std::sin(y)));
    }
    CHECK(eg < 2e-3);
    CHECK(eh < 4e-3);
}

TEST_CASE("weighted laplacian includes the drift") {
    // f = sin(x)/2, u = cos x: Lap_f u = -cos x + (cos(x)/2) sin x
    const auto m = torus(128, 0.5);
    const auto u = sample(m, [](double x, double) { return std::cos(x); });
    const auto l = weighted_laplacian(m, u);
    double e = 0.0;
    for (int p = 0; p < m.node_count(); ++p) {
        const double x = m.geometry().coords[p].c0;
        e = std::max(e, std::abs(l[p] - (-std::cos(x) + 0.5 * std::cos(x) * std::sin(x))));
    }
    CHECK(e < 1e-3);
}

TEST_CASE("sphere Hessian of z is -z g / R^2") {
    ManifoldDescription d;
    d.kind = ManifoldKind::sphere;
    d.resolution = {64, 128};
    d.radius = 1.0;
    const auto m = build_manifold(d);
    std::vector<double> z(m.node_count());
    for (int p = 0; p < m.node_count(); ++p) z[p] = std::cos(m.geometry().coords[p].c0);
    const auto h = hessian(m, ScalarField(m, z));
    double e = 0.0;
    for (int p = 0; p < m.node_count(); ++p) {
        const Sym2 expected = -z[p] * m.metric(p);
        e = std::max({e, std::abs(h.components[p].a00 - expected.a00), std::abs(h.components[p].a11 - expected.a11)});
    }
    CHECK(e < 2e-3);
}

TEST_CASE("fields are tied to their metric snapshot") {
    const auto m = torus(16);
    const auto later = m.with_conformal_factor(std::vector<double>(m.node_count(), 0.0), 0.25);
    const ScalarField u(m, std::vector<double>(m.node_count(), 1.0), "u");
    CHECK_THROWS_AS(laplacian(later, u), InvalidInput);
    CHECK_NOTHROW(laplacian(m, u));
    CHECK_THROWS_AS(ScalarField(m, std::vector<double>(3, 0.0)), InvalidInput);
    std::vector<double> bad(m.node_count(), 0.0);
    bad[5] = std::nan("");
    CHECK_THROWS_AS(ScalarField(m, bad, "bad"), NonFiniteField);
}

TEST_CASE("residuals vanish on constants") {
    const auto m = torus(16, 0.5);
    const ScalarField c(m, std::vector<double>(m.node_count(), 3.0));
    CHECK(sup_abs(delta_f_square_residual(m, c).values()) == 0.0);
    CHECK(sup_abs(bochner_residual(m, c).values()) == 0.0);
}

TEST_CASE("pointwise proof inequalities hold for random fields") {
    gen::Rng rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        auto d = rng.manifold();
        const auto m = build_manifold(d);
        CutoffDescription cd;
        cd.region = CutoffRegion::ball;
        cd.center = d.kind == ManifoldKind::flat_patch ? Vec2{0.0, 0.0} : Vec2{1.0, 1.0};
        cd.radius = rng.uniform(0.8, 1.5);
        const auto chi = build_cutoff(m, cd);
        const ScalarField u(m, band_limited_field(m, 5, rng.seed()), "u");
        const ScalarField v(m, band_limited_field(m, 5, rng.seed()), "v");
        const auto rep = proof_inequalities_check(m, u, v, chi);
        INFO("trial " << trial);
        CHECK(rep.holds());
        CHECK(rep.find("young").violations == 0);
    }
}

TEST_CASE("the chi^2 Hessian cross-term form fails where chi < 1") {
    const double pi = std::numbers::pi;
    const auto m = torus(32);
    CutoffDescription cd;
    cd.region = CutoffRegion::ball;
    cd.center = {pi, pi};
    cd.radius = 2.0;
    const auto chi = build_cutoff(m, cd);
    const auto u = sample(m, [](double x, double y) { return std::sin(2.0 * x) + std::cos(3.0 * y); });
    const auto rep = proof_inequalities_check(m, u, u, chi);
    CHECK(rep.holds());
    CHECK_FALSE(rep.find("hessian-cross-chi2").enforced);
    CHECK(rep.find("hessian-cross-chi2").violations > 0);
}

TEST_CASE("Young slack is never negative") {
    gen::Rng rng(22);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-10.0, 10.0), b = rng.uniform(-10.0, 10.0);
        CHECK(young_slack(a, b) >= -1e-12 * (a * a + b * b));
    }
    CHECK(young_slack(2.0, 1.0) == 0.0);
}

TEST_CASE("the dimension inequality holds for random tensors") {
    // (tr_g H - <df, du>)^2 / m <= |H|^2 + <df, du>^2 / (m - n) for n = 2
    gen::Rng rng(23);
    for (int i = 0; i < 2000; ++i) {
        const Sym2 g = rng.spd();
        const Sym2 inv = inverse(g);
        const Sym2 h = rng.sym2(3.0);
        const double drift = rng.uniform(-3.0, 3.0);
        const double m = rng.uniform(2.01, 10.0);
        const double lhs = std::pow(trace(inv, h) - drift, 2) / m;
        const double rhs = norm_squared(inv, h) + drift * drift / (m - 2.0);
        CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-14);
    }
}

TEST_CASE("graph operators are unavailable where undefined") {
    ManifoldDescription d;
    d.kind = ManifoldKind::weighted_graph;
    d.graph.nodes = 16;
    d.synthetic_dimension = 3.0;
    const auto m = build_manifold(d);
    const ScalarField u(m, std::vector<double>(16, 1.0));
    CHECK_THROWS_AS(hessian(m, u), UnsupportedGeometry);
    CHECK_THROWS_AS(bochner_residual(m, u), UnsupportedGeometry);
    CHECK(sup_abs(gradient_norm_squared(m, u)) == 0.0);
}

TEST_CASE("weighted Laplacian with f = x on a flat patch") {
    ManifoldDescription d;
    d.kind = ManifoldKind::flat_patch;
    d.resolution = {17, 17};
    d.side = 2.0;
    d.weight.kind = WeightKind::linear;
    d.weight.amplitude = 1.0;
    const auto m = build_manifold(d);
    std::vector<double> x(m.node_count());
    for (int p = 0; p < m.node_count(); ++p) x[p] = m.geometry().coords[p].c0;
    const ScalarField lap = weighted_laplacian(m, ScalarField(m, x));
    for (double l : lap.values()) CHECK(l == doctest::Approx(-1.0));
}

TEST_CASE("weighted Laplacian is linear") {
    gen::Rng rng(24);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = build_manifold(rng.manifold());
        const auto u = band_limited_field(m, 5, rng.seed());
        const auto v = band_limited_field(m, 5, rng.seed());
        const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
        std::vector<double> w(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) w[i] = a * u[i] + b * v[i];
        const auto lu = weighted_laplacian(m, u), lv = weighted_laplacian(m, v), lw = weighted_laplacian(m, w);
        double scale = 1.0;
        for (std::size_t i = 0; i < u.size(); ++i) scale = std::max(scale, std::abs(lu[i]) + std::abs(lv[i]));
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(lw[i] - a * lu[i] - b * lv[i]) <= 1e-12 * scale);
    }
}

TEST_CASE("gradient of the height on the unit sphere") {
    ManifoldDescription d;
    d.kind = ManifoldKind::sphere;
    d.resolution = {64, 128};
    const auto m = build_manifold(d);
    std::vector<double> z(m.node_count());
    for (int p = 0; p < m.node_count(); ++p) z[p] = std::cos(m.geometry().coords[p].c0);
    const auto g = gradient_norm_squared(m, ScalarField(m, z));
    double e = 0.0;
    for (int p = 0; p < m.node_count(); ++p) e = std::max(e, std::abs(g[p] - (1.0 - z[p] * z[p])));
    CHECK(e < 1e-3);
}

TEST_CASE("zero field satisfies every inequality with no slack used") {
    const auto m = torus(16, 0.5);
    CutoffDescription cd;
    cd.region = CutoffRegion::ball;
    cd.center = {3.0, 3.0};
    cd.radius = 2.0;
    const auto chi = build_cutoff(m, cd);
    const ScalarField zero(m, std::vector<double>(m.node_count(), 0.0));
    const auto rep = proof_inequalities_check(m, zero, zero, chi);
    for (const auto& c : rep.checks) CHECK(c.violations == 0);
}
