#include "bernstein/manifold.hpp"

#include "bernstein/cutoff.hpp"
#include "bernstein/error.hpp"
#include "bernstein/graph_curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bernstein {
namespace {

constexpr double kPi = std::numbers::pi;

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseOp from_triplets(int n, const Triplets& triplets) {
    SparseOp op(n, n);
    op.setFromTriplets(triplets.begin(), triplets.end());
    op.makeCompressed();
    return op;
}

SparseOp diagonal(const std::vector<double>& d) {
    Triplets t;
    t.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) t.emplace_back(int(i), int(i), d[i]);
    return from_triplets(int(d.size()), t);
}

// Node at a stencil offset; -1 past a non-periodic patch edge. On the
// sphere, stepping past a pole lands on the antipodal meridian.
int offset_node(const Geometry& g, int i0, int i1, int d0, int d1) {
    const GridAxis& a0 = g.axes[0];
    const GridAxis& a1 = g.axes[1];
    int j0 = i0 + d0;
    int j1 = i1 + d1;
    if (a0.periodic) {
        j0 = ((j0 % a0.count) + a0.count) % a0.count;
    } else if (g.kind == ManifoldKind::sphere) {
        if (j0 < 0) {
            j0 = -j0 - 1;
            j1 += a1.count / 2;
        } else if (j0 >= a0.count) {
            j0 = 2 * a0.count - 1 - j0;
            j1 += a1.count / 2;
        }
    } else if (j0 < 0 || j0 >= a0.count) {
        return -1;
    }
    if (a1.periodic) {
        j1 = ((j1 % a1.count) + a1.count) % a1.count;
    } else if (j1 < 0 || j1 >= a1.count) {
        return -1;
    }
    return g.index(j0, j1);
}

int offset_along(const Geometry& g, int node, int axis, int step) {
    const int i0 = node % g.axes[0].count;
    const int i1 = node / g.axes[0].count;
    return axis == 0 ? offset_node(g, i0, i1, step, 0) : offset_node(g, i0, i1, 0, step);
}

SparseOp first_derivative(const Geometry& g, int axis) {
    const double h = g.axes[axis].spacing;
    Triplets t;
    t.reserve(3 * g.node_count);
    for (int p = 0; p < g.node_count; ++p) {
        const int minus = offset_along(g, p, axis, -1);
        const int plus = offset_along(g, p, axis, +1);
        if (minus >= 0 && plus >= 0) {
            t.emplace_back(p, plus, 0.5 / h);
            t.emplace_back(p, minus, -0.5 / h);
        } else if (minus < 0) {
            t.emplace_back(p, p, -1.5 / h);
            t.emplace_back(p, offset_along(g, p, axis, 1), 2.0 / h);
            t.emplace_back(p, offset_along(g, p, axis, 2), -0.5 / h);
        } else {
            t.emplace_back(p, p, 1.5 / h);
            t.emplace_back(p, offset_along(g, p, axis, -1), -2.0 / h);
            t.emplace_back(p, offset_along(g, p, axis, -2), 0.5 / h);
        }
    }
    return from_triplets(g.node_count, t);
}

SparseOp second_derivative(const Geometry& g, int axis) {
    const double h2 = g.axes[axis].spacing * g.axes[axis].spacing;
    Triplets t;
    t.reserve(4 * g.node_count);
    for (int p = 0; p < g.node_count; ++p) {
        const int minus = offset_along(g, p, axis, -1);
        const int plus = offset_along(g, p, axis, +1);
        if (minus >= 0 && plus >= 0) {
            t.emplace_back(p, plus, 1.0 / h2);
            t.emplace_back(p, p, -2.0 / h2);
            t.emplace_back(p, minus, 1.0 / h2);
        } else {
            const int dir = minus < 0 ? 1 : -1;
            t.emplace_back(p, p, 2.0 / h2);
            t.emplace_back(p, offset_along(g, p, axis, dir), -5.0 / h2);
            t.emplace_back(p, offset_along(g, p, axis, 2 * dir), 4.0 / h2);
            t.emplace_back(p, offset_along(g, p, axis, 3 * dir), -1.0 / h2);
        }
    }
    return from_triplets(g.node_count, t);
}

// Conservative colatitude flux form; the polar faces carry zero flux.
SparseOp sphere_laplacian(const Geometry& g) {
    const int n0 = g.axes[0].count;
    const double ht = g.axes[0].spacing;
    const double hp = g.axes[1].spacing;
    const double r2 = g.radius * g.radius;
    Triplets t;
    t.reserve(5 * g.node_count);
    for (int p = 0; p < g.node_count; ++p) {
        const int i0 = p % n0;
        const double theta = g.coords[p].c0;
        const double s = std::sin(theta);
        const double s_lo = i0 == 0 ? 0.0 : std::sin(theta - 0.5 * ht);
        const double s_hi = i0 == n0 - 1 ? 0.0 : std::sin(theta + 0.5 * ht);
        const double ct = 1.0 / (r2 * s * ht * ht);
        if (s_hi != 0.0) {
            t.emplace_back(p, offset_along(g, p, 0, 1), ct * s_hi);
            t.emplace_back(p, p, -ct * s_hi);
        }
        if (s_lo != 0.0) {
            t.emplace_back(p, offset_along(g, p, 0, -1), ct * s_lo);
            t.emplace_back(p, p, -ct * s_lo);
        }
        const double cp = 1.0 / (r2 * s * s * hp * hp);
        t.emplace_back(p, offset_along(g, p, 1, 1), cp);
        t.emplace_back(p, offset_along(g, p, 1, -1), cp);
        t.emplace_back(p, p, -2.0 * cp);
    }
    return from_triplets(g.node_count, t);
}

struct WeightSample {
    double value = 0.0;
    Vec2 d{};
    Sym2 dd{};
};

WeightSample sample_weight(const WeightSpec& w, const Geometry& g, Vec2 q) {
    WeightSample out;
    const double a = w.amplitude;
    switch (w.kind) {
        case WeightKind::zero:
            break;
        case WeightKind::linear:
            if (g.kind == ManifoldKind::sphere) {
                const double R = g.radius;
                const double st = std::sin(q.c0), ct = std::cos(q.c0);
                const double sp = std::sin(q.c1), cp = std::cos(q.c1);
                if (w.axis == 0) {
                    out.value = a * R * st * cp;
                    out.d = {a * R * ct * cp, -a * R * st * sp};
                    out.dd = {-a * R * st * cp, -a * R * ct * sp, -a * R * st * cp};
                } else if (w.axis == 1) {
                    out.value = a * R * st * sp;
                    out.d = {a * R * ct * sp, a * R * st * cp};
                    out.dd = {-a * R * st * sp, a * R * ct * cp, -a * R * st * sp};
                } else {
                    out.value = a * R * ct;
                    out.d = {-a * R * st, 0.0};
                    out.dd = {-a * R * ct, 0.0, 0.0};
                }
            } else {
                out.value = a * (w.axis == 0 ? q.c0 : q.c1);
                out.d = w.axis == 0 ? Vec2{a, 0.0} : Vec2{0.0, a};
            }
            break;
        case WeightKind::sine: {
            const double k = w.wavenumber;
            const double x = w.axis == 0 ? q.c0 : q.c1;
            out.value = a * std::sin(k * x);
            const double d1 = a * k * std::cos(k * x);
            const double d2 = -a * k * k * std::sin(k * x);
            out.d = w.axis == 0 ? Vec2{d1, 0.0} : Vec2{0.0, d1};
            out.dd = w.axis == 0 ? Sym2{d2, 0.0, 0.0} : Sym2{0.0, 0.0, d2};
            break;
        }
        case WeightKind::radial_gaussian: {
            const double s2 = w.width * w.width;
            const double x = q.c0 - w.center.c0;
            const double y = q.c1 - w.center.c1;
            const double e = a * std::exp(-(x * x + y * y) / (2.0 * s2));
            out.value = e;
            out.d = {-x / s2 * e, -y / s2 * e};
            out.dd = {(x * x / s2 - 1.0) / s2 * e, x * y / (s2 * s2) * e, (y * y / s2 - 1.0) / s2 * e};
            break;
        }
    }
    return out;
}

void validate_weight(const WeightSpec& w, ManifoldKind kind, double side) {
    if (w.axis < 0 || w.axis > (kind == ManifoldKind::sphere ? 2 : 1)) {
        throw InvalidInput("weight axis out of range");
    }
    switch (w.kind) {
        case WeightKind::zero:
            return;
        case WeightKind::linear:
            if (kind == ManifoldKind::torus || kind == ManifoldKind::weighted_graph) {
                throw InvalidInput("linear weight is not single-valued on a periodic manifold");
            }
            return;
        case WeightKind::sine: {
            if (kind == ManifoldKind::sphere) throw InvalidInput("sine weight is not smooth on the sphere grid");
            if (kind == ManifoldKind::torus || kind == ManifoldKind::weighted_graph) {
                const double periods = w.wavenumber * side / (2.0 * kPi);
                if (std::abs(periods - std::round(periods)) > 1e-9) {
                    throw InvalidInput("sine weight wavenumber must be commensurate with the period");
                }
            }
            return;
        }
        case WeightKind::radial_gaussian:
            if (kind != ManifoldKind::flat_patch) {
                throw InvalidInput("radial-gaussian weight is only available on a flat patch");
            }
            if (!(w.width > 0.0)) throw InvalidInput("radial-gaussian width must be positive");
            return;
    }
}

std::shared_ptr<Geometry> grid_geometry(const ManifoldDescription& d) {
    auto g = std::make_shared<Geometry>();
    g->kind = d.kind;
    g->dimension = 2;
    g->radius = d.radius;
    g->side = d.side;
    const int n0 = d.resolution[0];
    const int n1 = d.resolution[1];
    switch (d.kind) {
        case ManifoldKind::torus:
            if (!(d.side > 0.0)) throw InvalidInput("torus side must be positive");
            g->axes[0] = {n0, 0.0, d.side / n0, true};
            g->axes[1] = {n1, 0.0, d.side / n1, true};
            break;
        case ManifoldKind::flat_patch:
            if (!(d.side > 0.0)) throw InvalidInput("patch side must be positive");
            g->axes[0] = {n0, -0.5 * d.side, d.side / (n0 - 1), false};
            g->axes[1] = {n1, -0.5 * d.side, d.side / (n1 - 1), false};
            break;
        case ManifoldKind::sphere:
            if (!(d.radius > 0.0)) throw InvalidInput("sphere radius must be positive");
            if (n1 % 2 != 0) throw InvalidInput("sphere longitude resolution must be even");
            g->axes[0] = {n0, 0.5 * kPi / n0, kPi / n0, false};
            g->axes[1] = {n1, 0.0, 2.0 * kPi / n1, true};
            break;
        case ManifoldKind::weighted_graph:
            break;
    }
    const int n = n0 * n1;
    g->node_count = n;
    g->coords.resize(n);
    g->g0.resize(n);
    g->g0_inv.resize(n);
    g->g0_min_eigenvalue.resize(n);
    g->christoffel0.assign(n, Christoffel{});
    g->k0.assign(n, 0.0);
    g->neighbors.resize(n);
    for (int i1 = 0; i1 < n1; ++i1) {
        for (int i0 = 0; i0 < n0; ++i0) {
            const int p = g->index(i0, i1);
            const Vec2 q{g->axes[0].origin + i0 * g->axes[0].spacing, g->axes[1].origin + i1 * g->axes[1].spacing};
            g->coords[p] = q;
            if (d.kind == ManifoldKind::sphere) {
                const double r2 = d.radius * d.radius;
                const double st = std::sin(q.c0), ct = std::cos(q.c0);
                g->g0[p] = {r2, 0.0, r2 * st * st};
                g->christoffel0[p][0] = {0.0, 0.0, -st * ct};
                g->christoffel0[p][1] = {0.0, ct / st, 0.0};
                g->k0[p] = 1.0 / r2;
            } else {
                g->g0[p] = {1.0, 0.0, 1.0};
            }
            g->g0_inv[p] = inverse(g->g0[p]);
            g->g0_min_eigenvalue[p] = min_eigenvalue(g->g0[p]);
            if (!(g->g0_min_eigenvalue[p] > 0.0)) throw InvalidInput("background metric is not positive definite");
            g->neighbors[p] = {offset_node(*g, i0, i1, -1, 0), offset_node(*g, i0, i1, 1, 0),
                               offset_node(*g, i0, i1, 0, -1), offset_node(*g, i0, i1, 0, 1)};
        }
    }
    g->d0 = first_derivative(*g, 0);
    g->d1 = first_derivative(*g, 1);
    g->d00 = second_derivative(*g, 0);
    g->d11 = second_derivative(*g, 1);
    g->d01 = SparseOp(g->d1 * g->d0);
    g->lap0 = d.kind == ManifoldKind::sphere ? sphere_laplacian(*g) : SparseOp(g->d00 + g->d11);
    return g;
}

std::shared_ptr<Geometry> graph_geometry(const ManifoldDescription& d) {
    const GraphDescription& gd = d.graph;
    auto g = std::make_shared<Geometry>();
    g->kind = ManifoldKind::weighted_graph;
    g->dimension = gd.dimension;
    g->node_count = gd.nodes;
    g->side = gd.side;
    const int n = gd.nodes;
    std::vector<WeightedEdge> edges = gd.edges;
    g->coords.assign(n, Vec2{});
    if (edges.empty()) {
        const double h = gd.side / n;
        for (int i = 0; i < n; ++i) {
            edges.push_back({i, (i + 1) % n, 1.0 / (h * h)});
            g->coords[i] = {i * h, 0.0};
        }
    } else {
        if (!gd.coordinates.empty()) {
            if (int(gd.coordinates.size()) != n) throw InvalidInput("graph coordinates must have one entry per node");
            for (int i = 0; i < n; ++i) g->coords[i] = {gd.coordinates[i], 0.0};
        }
        for (const auto& e : edges) {
            if (e.from < 0 || e.to < 0 || e.from >= n || e.to >= n || e.from == e.to) {
                throw InvalidInput("graph edge endpoints out of range");
            }
            if (!(e.weight > 0.0)) throw InvalidInput("graph edge weights must be positive");
        }
    }
    g->g0.assign(n, Sym2{1.0, 0.0, 1.0});
    g->g0_inv = g->g0;
    g->g0_min_eigenvalue.assign(n, 1.0);
    g->christoffel0.assign(n, Christoffel{});
    g->k0.assign(n, 0.0);
    g->adjacency.assign(n, {});
    // Unweighted adjacency is stored temporarily; drift weights are applied
    // once f has been sampled.
    for (const auto& e : edges) {
        g->adjacency[e.from].emplace_back(e.to, e.weight);
        g->adjacency[e.to].emplace_back(e.from, e.weight);
    }
    return g;
}

void finish_graph(Geometry& g) {
    Triplets plain;
    Triplets weighted;
    for (int x = 0; x < g.node_count; ++x) {
        for (auto& [y, w] : g.adjacency[x]) {
            plain.emplace_back(x, y, w);
            plain.emplace_back(x, x, -w);
            w *= std::exp(0.5 * (g.f[x] - g.f[y]));
            weighted.emplace_back(x, y, w);
            weighted.emplace_back(x, x, -w);
        }
    }
    g.lap0 = from_triplets(g.node_count, plain);
    g.lap0_f = from_triplets(g.node_count, weighted);
}

Christoffel conformal_christoffel(const Geometry& g, int p, Vec2 dphi) {
    const Sym2& g0 = g.g0[p];
    const Vec2 w = raise(g.g0_inv[p], dphi);
    Christoffel c = g.christoffel0[p];
    c[0] = c[0] + Sym2{2.0 * dphi.c0, dphi.c1, 0.0} - w.c0 * g0;
    c[1] = c[1] + Sym2{0.0, dphi.c0, 2.0 * dphi.c1} - w.c1 * g0;
    return c;
}

}  // namespace

std::string to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::torus: return "torus-grid";
        case ManifoldKind::sphere: return "sphere-grid";
        case ManifoldKind::flat_patch: return "flat-patch-grid";
        case ManifoldKind::weighted_graph: return "weighted-graph";
    }
    return "?";
}

ManifoldKind parse_manifold_kind(std::string_view text) {
    if (text == "torus-grid" || text == "torus") return ManifoldKind::torus;
    if (text == "sphere-grid" || text == "sphere") return ManifoldKind::sphere;
    if (text == "flat-patch-grid" || text == "flat-patch") return ManifoldKind::flat_patch;
    if (text == "weighted-graph") return ManifoldKind::weighted_graph;
    throw InvalidInput("unknown manifold kind '" + std::string(text) + "'");
}

std::string to_string(WeightKind kind) {
    switch (kind) {
        case WeightKind::zero: return "zero";
        case WeightKind::linear: return "linear-in-coordinate";
        case WeightKind::sine: return "sine";
        case WeightKind::radial_gaussian: return "radial-gaussian";
    }
    return "?";
}

WeightKind parse_weight_kind(std::string_view text) {
    if (text == "zero") return WeightKind::zero;
    if (text == "linear-in-coordinate" || text == "linear") return WeightKind::linear;
    if (text == "sine") return WeightKind::sine;
    if (text == "radial-gaussian") return WeightKind::radial_gaussian;
    throw InvalidInput("unknown weight kind '" + std::string(text) + "'");
}

DiscreteManifold::DiscreteManifold(std::shared_ptr<const Geometry> geometry, double synthetic_dimension,
                                   WeightSpec weight, WeightBounds weight_bounds, std::vector<double> conformal,
                                   double time)
    : geometry_(std::move(geometry)),
      synthetic_dimension_(synthetic_dimension),
      weight_(weight),
      weight_bounds_(weight_bounds),
      conformal_(std::move(conformal)),
      time_(time) {
    const Geometry& g = *geometry_;
    const int n = g.node_count;
    if (int(conformal_.size()) != n) throw InvalidInput("conformal factor size does not match node count");
    if (!(synthetic_dimension_ > g.dimension)) {
        throw InvalidInput("synthetic dimension m must exceed the manifold dimension n (the estimates divide by m - n)");
    }
    inverse_scale_.resize(n);
    for (int p = 0; p < n; ++p) {
        if (!std::isfinite(conformal_[p])) throw NonFiniteField("conformal factor", p, time_);
        inverse_scale_[p] = std::exp(-2.0 * conformal_[p]);
    }

    const double mn = synthetic_dimension_ - g.dimension;
    curvature_.bakry_emery_min_eig.resize(n);
    if (g.is_graph()) {
        for (int p = 0; p < n; ++p) {
            curvature_.bakry_emery_min_eig[p] = graph_bakry_emery_curvature(g, p, synthetic_dimension_);
        }
    } else {
        const auto p0 = apply_difference(g.d0, conformal_);
        const auto p1 = apply_difference(g.d1, conformal_);
        conformal_gradient_.resize(n);
        for (int p = 0; p < n; ++p) conformal_gradient_[p] = {p0[p], p1[p]};
        curvature_.gaussian = gaussian_curvature(g, conformal_);
        curvature_.ricci.resize(n);
        curvature_.bakry_emery.resize(n);
        for (int p = 0; p < n; ++p) {
            const Sym2 gp = metric(p);
            if (!(min_eigenvalue(gp) > 0.0)) throw InvalidInput("metric is not positive definite");
            curvature_.ricci[p] = curvature_.gaussian[p] * gp;
            curvature_.bakry_emery[p] = curvature_.ricci[p] + weight_hessian(p) - (1.0 / mn) * outer(g.df[p]);
            curvature_.bakry_emery_min_eig[p] = min_generalized_eigenvalue(curvature_.bakry_emery[p], gp);
        }
    }
    // Fixed left-to-right reduction.
    double worst = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n; ++p) {
        if (curvature_.bakry_emery_min_eig[p] < worst) {
            worst = curvature_.bakry_emery_min_eig[p];
            curvature_.witness_node = p;
        }
    }
    curvature_.lower_bound = std::max(0.0, -worst);
}

Sym2 DiscreteManifold::metric(int node) const {
    if (geometry_->is_graph()) return geometry_->g0[node];
    return std::exp(2.0 * conformal_[node]) * geometry_->g0[node];
}

Sym2 DiscreteManifold::inverse_metric(int node) const {
    if (geometry_->is_graph()) return geometry_->g0_inv[node];
    return inverse_scale_[node] * geometry_->g0_inv[node];
}

Christoffel DiscreteManifold::christoffel(int node) const {
    if (geometry_->is_graph()) throw UnsupportedGeometry("Christoffel symbols are not defined on a weighted graph");
    return conformal_christoffel(*geometry_, node, conformal_gradient_[node]);
}

double DiscreteManifold::metric_min_eigenvalue() const {
    double out = std::numeric_limits<double>::infinity();
    for (int p = 0; p < node_count(); ++p) {
        out = std::min(out, geometry_->g0_min_eigenvalue[p] / inverse_scale_[p]);
    }
    return out;
}

Sym2 DiscreteManifold::weight_hessian(int node) const {
    if (geometry_->is_graph()) throw UnsupportedGeometry("covariant Hessian is not defined on a weighted graph");
    const Christoffel c = christoffel(node);
    const Vec2 df = geometry_->df[node];
    return geometry_->ddf[node] - df.c0 * c[0] - df.c1 * c[1];
}

DiscreteManifold DiscreteManifold::with_conformal_factor(std::vector<double> conformal, double time) const {
    return DiscreteManifold(geometry_, synthetic_dimension_, weight_, weight_bounds_, std::move(conformal), time);
}

void apply_difference(const SparseOp& op, std::span<const double> u, std::span<double> out) {
    for (int i = 0; i < op.rows(); ++i) {
        const double ui = u[i];
        double acc = 0.0;
        for (SparseOp::InnerIterator it(op, i); it; ++it) {
            if (it.col() != i) acc += it.value() * (u[it.col()] - ui);
        }
        out[i] = acc;
    }
}

std::vector<double> apply_difference(const SparseOp& op, std::span<const double> u) {
    std::vector<double> out(op.rows());
    apply_difference(op, u, out);
    return out;
}

std::vector<double> gaussian_curvature(const Geometry& g, std::span<const double> phi) {
    const int n = g.node_count;
    const auto lap = apply_difference(g.lap0, phi);
    std::vector<double> out(n);
    for (int p = 0; p < n; ++p) out[p] = std::exp(-2.0 * phi[p]) * (g.k0[p] - lap[p]);
    return out;
}

void conformal_flow_rhs(const Geometry& g, std::span<const double> chi, std::span<const double> phi,
                        std::span<double> out) {
    const int n = g.node_count;
    const auto lap = apply_difference(g.lap0, phi);
    for (int p = 0; p < n; ++p) {
        const double c2 = chi[p] * chi[p];
        out[p] = c2 == 0.0 ? 0.0 : -c2 * std::exp(-2.0 * phi[p]) * (g.k0[p] - lap[p]);
    }
}

WeightBounds analytic_weight_bounds(const WeightSpec& w, ManifoldKind kind, double radius) {
    const double a = std::abs(w.amplitude);
    switch (w.kind) {
        case WeightKind::zero:
            return {0.0, 0.0};
        case WeightKind::linear:
            // On the sphere Hess(c X_k) = -(c X_k / R^2) g.
            return kind == ManifoldKind::sphere ? WeightBounds{a, a / radius} : WeightBounds{a, 0.0};
        case WeightKind::sine: {
            const double k = std::abs(w.wavenumber);
            return {a * k, a * k * k};
        }
        case WeightKind::radial_gaussian: {
            const double s = w.width;
            const double grad = a * std::exp(-0.5) / s;
            // A > 0: most negative eigenvalue -A/s^2 at the centre.
            // A < 0: radial eigenvalue |A|(1 - r^2/s^2) e^{-r^2/2s^2}/s^2 is most negative at r^2 = 3 s^2.
            const double hess = w.amplitude >= 0.0 ? a / (s * s) : 2.0 * a * std::exp(-1.5) / (s * s);
            return {grad, hess};
        }
    }
    return {};
}

WeightBounds measure_weight_bounds(const DiscreteManifold& m) {
    WeightBounds out;
    if (m.is_graph()) return out;
    for (int p = 0; p < m.node_count(); ++p) {
        const Vec2 df = m.weight_gradient(p);
        out.gradient = std::max(out.gradient, std::sqrt(contract(m.inverse_metric(p), df, df)));
        const double lam = min_generalized_eigenvalue(m.weight_hessian(p), m.metric(p));
        out.hessian = std::max(out.hessian, -lam);
    }
    return out;
}

DiscreteManifold build_manifold(const ManifoldDescription& d) {
    std::shared_ptr<Geometry> g;
    if (d.kind == ManifoldKind::weighted_graph) {
        if (d.graph.edges.empty() && d.graph.nodes < 8) throw InvalidInput("ring lattice needs at least 8 nodes");
        if (d.graph.nodes < 2) throw InvalidInput("graph needs at least 2 nodes");
        if (d.graph.dimension < 1) throw InvalidInput("graph dimension must be at least 1");
        if (!(d.synthetic_dimension > d.graph.dimension)) {
            throw InvalidInput("synthetic dimension m must exceed the manifold dimension n (the estimates divide by m - n)");
        }
        validate_weight(d.weight, d.kind, d.graph.side);
        g = graph_geometry(d);
    } else {
        if (d.resolution[0] < 8 || d.resolution[1] < 8) throw InvalidInput("grid resolution must be at least 8 per axis");
        if (!(d.synthetic_dimension > 2.0)) {
            throw InvalidInput("synthetic dimension m must exceed the manifold dimension n (the estimates divide by m - n)");
        }
        validate_weight(d.weight, d.kind, d.side);
        g = grid_geometry(d);
    }

    g->f.resize(g->node_count);
    g->df.resize(g->node_count);
    g->ddf.resize(g->node_count);
    for (int p = 0; p < g->node_count; ++p) {
        const WeightSample s = sample_weight(d.weight, *g, g->coords[p]);
        g->f[p] = s.value;
        g->df[p] = g->is_graph() ? Vec2{} : s.d;
        g->ddf[p] = g->is_graph() ? Sym2{} : s.dd;
    }
    if (g->is_graph()) {
        finish_graph(*g);
    } else {
        std::vector<double> b0(g->node_count), b1(g->node_count);
        for (int p = 0; p < g->node_count; ++p) {
            const Vec2 b = raise(g->g0_inv[p], g->df[p]);
            b0[p] = b.c0;
            b1[p] = b.c1;
        }
        const SparseOp drift0 = diagonal(b0) * g->d0;
        const SparseOp drift1 = diagonal(b1) * g->d1;
        g->lap0_f = SparseOp(g->lap0 - drift0 - drift1);
    }

    const WeightBounds bounds = analytic_weight_bounds(d.weight, d.kind, d.radius);
    DiscreteManifold out(g, d.synthetic_dimension, d.weight, bounds, std::vector<double>(g->node_count, 0.0), 0.0);

    const WeightBounds seen = measure_weight_bounds(out);
    if (seen.gradient > bounds.gradient + 1e-10 || seen.hessian > bounds.hessian + 1e-10) {
        throw std::logic_error("weight certification failed: node-wise bounds exceed the analytic bounds");
    }
    return out;
}

DiscreteManifold evolve_metric(const DiscreteManifold& m, const CutoffProfile& chi, double dt) {
    if (m.is_graph()) throw UnsupportedGeometry("metric evolution needs a two-dimensional grid");
    const Geometry& g = m.geometry();
    const int n = g.node_count;
    const auto c = chi.values();
    const auto phi = m.conformal_factor();

    std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
    conformal_flow_rhs(g, c, phi, k1);
    for (int p = 0; p < n; ++p) stage[p] = phi[p] + 0.5 * dt * k1[p];
    conformal_flow_rhs(g, c, stage, k2);
    for (int p = 0; p < n; ++p) stage[p] = phi[p] + 0.5 * dt * k2[p];
    conformal_flow_rhs(g, c, stage, k3);
    for (int p = 0; p < n; ++p) stage[p] = phi[p] + dt * k3[p];
    conformal_flow_rhs(g, c, stage, k4);

    std::vector<double> next(n);
    for (int p = 0; p < n; ++p) next[p] = phi[p] + dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);

    const double t = m.time() + dt;
    double smallest = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n; ++p) {
        if (!std::isfinite(next[p])) throw MetricDegeneration(t, std::numeric_limits<double>::quiet_NaN());
        smallest = std::min(smallest, g.g0_min_eigenvalue[p] * std::exp(2.0 * next[p]));
    }
    if (smallest < kMetricDegenerationThreshold) throw MetricDegeneration(t, smallest);
    return m.with_conformal_factor(std::move(next), t);
}

}  // namespace bernstein
