#include "oracles.hpp"

#include "bernstein/graph_curvature.hpp"
#include "bernstein/manifold.hpp"

#include <doctest.h>

#include <cmath>

using namespace bernstein;

namespace {

DiscreteManifold complete_graph(int n, double m) {
    ManifoldDescription d;
    d.kind = ManifoldKind::weighted_graph;
    d.graph.nodes = n;
    d.synthetic_dimension = m;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) d.graph.edges.push_back({i, j, 1.0});
    }
    return build_manifold(d);
}

}  // namespace

TEST_CASE("carre du champ on a path") {
    ManifoldDescription d;
    d.kind = ManifoldKind::weighted_graph;
    d.graph.nodes = 3;
    d.synthetic_dimension = 2.0;
    d.graph.edges = {{0, 1, 2.0}, {1, 2, 1.0}};
    const auto m = build_manifold(d);
    const std::vector<double> u{0.0, 1.0, 3.0};
    const auto g = graph_gamma(m.geometry(), u);
    CHECK(g[0] == doctest::Approx(1.0));  // 1/2 * 2 * 1
    CHECK(g[1] == doctest::Approx(3.0));  // 1/2 (2 * 1 + 1 * 4)
    CHECK(g[2] == doctest::Approx(2.0));
}

TEST_CASE("complete graph curvature approaches 1 + N/2 as m grows") {
    for (int n : {3, 4, 6}) {
        const auto m = complete_graph(n, 1e9);
        CHECK(graph_bakry_emery_curvature(m.geometry(), 0, 1e9) ==
              doctest::Approx(oracle::complete_graph_curvature(n)).epsilon(1e-5));
    }
}

TEST_CASE("graph curvature increases with the synthetic dimension") {
    const auto m = complete_graph(5, 3.0);
    double prev = -1e9;
    for (double dim : {1.5, 2.0, 4.0, 16.0, 1e6}) {
        const double k = graph_bakry_emery_curvature(m.geometry(), 0, dim);
        CHECK(k >= prev - 1e-9);
        prev = k;
    }
}

TEST_CASE("long cycle is flat for infinite dimension") {
    ManifoldDescription d;
    d.kind = ManifoldKind::weighted_graph;
    d.graph.nodes = 12;
    d.graph.side = 12.0;  // unit weights
    d.synthetic_dimension = 1e9;
    const auto m = build_manifold(d);
    CHECK(graph_bakry_emery_curvature(m.geometry(), 3, 1e9) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("graph manifold lower bound covers every vertex") {
    const auto m = complete_graph(4, 3.0);
    const auto& c = m.curvature();
    CHECK(c.bakry_emery_min_eig.size() == 4);
    for (double k : c.bakry_emery_min_eig) CHECK(k == doctest::Approx(c.bakry_emery_min_eig[0]));
    CHECK(c.lower_bound == doctest::Approx(std::max(0.0, -c.bakry_emery_min_eig[0])));
}
