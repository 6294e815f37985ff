#include "bernstein/calculus.hpp"

#include "bernstein/error.hpp"
#include "bernstein/graph_curvature.hpp"

#include <algorithm>
#include <cmath>

namespace bernstein {
namespace {

std::vector<double> apply_op(const SparseOp& op, std::span<const double> u) { return apply_difference(op, u); }

void require_grid(const DiscreteManifold& m, const char* what) {
    if (m.is_graph()) throw UnsupportedGeometry(std::string(what) + " is not available on a weighted graph");
}

}  // namespace

ScalarField::ScalarField(const DiscreteManifold& manifold, std::vector<double> values, std::string name)
    : values_(std::move(values)), name_(std::move(name)), metric_time_(manifold.time()) {
    if (int(values_.size()) != manifold.node_count()) {
        throw InvalidInput("field '" + name_ + "' has " + std::to_string(values_.size()) + " values for " +
                           std::to_string(manifold.node_count()) + " nodes");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) throw NonFiniteField(name_, int(i), metric_time_);
    }
}

void require_bound(const DiscreteManifold& manifold, const ScalarField& field) {
    if (field.size() != manifold.node_count() || field.metric_time() != manifold.time()) {
        throw InvalidInput("field '" + field.name() + "' is bound to the metric at t = " +
                           std::to_string(field.metric_time()) + ", not t = " + std::to_string(manifold.time()));
    }
}

std::vector<Vec2> coordinate_differential(const Geometry& g, std::span<const double> u) {
    const auto a = apply_op(g.d0, u);
    const auto b = apply_op(g.d1, u);
    std::vector<Vec2> out(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) out[p] = {a[p], b[p]};
    return out;
}

std::vector<double> gradient_norm_squared(const DiscreteManifold& m, std::span<const double> u) {
    if (m.is_graph()) return graph_gamma(m.geometry(), u);
    const auto du = coordinate_differential(m.geometry(), u);
    std::vector<double> out(du.size());
    for (std::size_t p = 0; p < du.size(); ++p) out[p] = contract(m.inverse_metric(int(p)), du[p], du[p]);
    return out;
}

std::vector<double> gradient_inner(const DiscreteManifold& m, std::span<const double> u, std::span<const double> v) {
    const int n = m.node_count();
    std::vector<double> out(n, 0.0);
    if (m.is_graph()) {
        const Geometry& g = m.geometry();
        for (int x = 0; x < n; ++x) {
            double acc = 0.0;
            for (const auto& [y, w] : g.adjacency[x]) acc += w * (u[y] - u[x]) * (v[y] - v[x]);
            out[x] = 0.5 * acc;
        }
        return out;
    }
    const auto du = coordinate_differential(m.geometry(), u);
    const auto dv = coordinate_differential(m.geometry(), v);
    for (int p = 0; p < n; ++p) out[p] = contract(m.inverse_metric(p), du[p], dv[p]);
    return out;
}

std::vector<double> weighted_laplacian(const DiscreteManifold& m, std::span<const double> u) {
    auto out = apply_op(m.geometry().lap0_f, u);
    if (!m.is_graph()) {
        const auto s = m.inverse_scale();
        for (std::size_t p = 0; p < out.size(); ++p) out[p] *= s[p];
    }
    return out;
}

std::vector<Sym2> hessian(const DiscreteManifold& m, std::span<const double> u) {
    require_grid(m, "the Hessian");
    const Geometry& g = m.geometry();
    const auto uxx = apply_op(g.d00, u);
    const auto uxy = apply_op(g.d01, u);
    const auto uyy = apply_op(g.d11, u);
    const auto du = coordinate_differential(g, u);
    std::vector<Sym2> out(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) {
        const Christoffel c = m.christoffel(int(p));
        out[p] = Sym2{uxx[p], uxy[p], uyy[p]} - du[p].c0 * c[0] - du[p].c1 * c[1];
    }
    return out;
}

GradientField gradient(const DiscreteManifold& m, const ScalarField& u) {
    require_bound(m, u);
    require_grid(m, "the coordinate gradient");
    GradientField out;
    out.metric_time = m.time();
    out.differential = coordinate_differential(m.geometry(), u.values());
    out.vector.resize(out.differential.size());
    for (std::size_t p = 0; p < out.vector.size(); ++p) {
        out.vector[p] = raise(m.inverse_metric(int(p)), out.differential[p]);
    }
    return out;
}

std::vector<double> gradient_norm_squared(const DiscreteManifold& m, const ScalarField& u) {
    require_bound(m, u);
    return gradient_norm_squared(m, u.values());
}

std::vector<double> gradient_inner(const DiscreteManifold& m, const ScalarField& u, const ScalarField& v) {
    require_bound(m, u);
    require_bound(m, v);
    return gradient_inner(m, u.values(), v.values());
}

ScalarField laplacian(const DiscreteManifold& m, const ScalarField& u) {
    require_bound(m, u);
    auto out = apply_op(m.geometry().lap0, u.values());
    if (!m.is_graph()) {
        const auto s = m.inverse_scale();
        for (std::size_t p = 0; p < out.size(); ++p) out[p] *= s[p];
    }
    return ScalarField(m, std::move(out), "lap " + u.name());
}

ScalarField weighted_laplacian(const DiscreteManifold& m, const ScalarField& u) {
    require_bound(m, u);
    return ScalarField(m, weighted_laplacian(m, u.values()), "lap_f " + u.name());
}

HessianField hessian(const DiscreteManifold& m, const ScalarField& u) {
    require_bound(m, u);
    return {hessian(m, u.values()), m.time()};
}

ScalarField delta_f_square_residual(const DiscreteManifold& m, const ScalarField& u) {
    require_bound(m, u);
    const auto vals = u.values();
    std::vector<double> sq(vals.size());
    for (std::size_t p = 0; p < vals.size(); ++p) sq[p] = vals[p] * vals[p];
    const auto lap_sq = weighted_laplacian(m, sq);
    const auto grad2 = gradient_norm_squared(m, vals);
    const auto lap = weighted_laplacian(m, vals);
    std::vector<double> out(vals.size());
    for (std::size_t p = 0; p < vals.size(); ++p) out[p] = lap_sq[p] - 2.0 * grad2[p] - 2.0 * vals[p] * lap[p];
    return ScalarField(m, std::move(out), "delta_f square residual");
}

ScalarField bochner_residual(const DiscreteManifold& m, const ScalarField& u) {
    require_bound(m, u);
    require_grid(m, "the Bochner residual");
    const auto vals = u.values();
    const int n = m.node_count();
    const auto grad2 = gradient_norm_squared(m, vals);
    const auto lap_grad2 = weighted_laplacian(m, grad2);
    const auto hess = hessian(m, vals);
    const auto lap = weighted_laplacian(m, vals);
    const auto du = coordinate_differential(m.geometry(), vals);
    const auto dlap = coordinate_differential(m.geometry(), lap);
    const auto& curv = m.curvature();
    std::vector<double> out(n);
    for (int p = 0; p < n; ++p) {
        const Sym2 inv = m.inverse_metric(p);
        const Vec2 grad = raise(inv, du[p]);
        const Sym2 ric_f = curv.ricci[p] + m.weight_hessian(p);
        out[p] = 0.5 * lap_grad2[p] - norm_squared(inv, hess[p]) - contract(inv, du[p], dlap[p]) -
                 apply(ric_f, grad, grad);
    }
    return ScalarField(m, std::move(out), "bochner residual");
}

bool InequalityReport::holds() const {
    for (const auto& c : checks) {
        if (c.enforced && c.violations > 0) return false;
    }
    return true;
}

const InequalityCheck& InequalityReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return c;
    }
    throw InvalidInput("no inequality named '" + name + "'");
}

InequalityReport proof_inequalities_check(const DiscreteManifold& m, const ScalarField& u, const ScalarField& v,
                                          const CutoffProfile& chi, double tolerance) {
    require_bound(m, u);
    require_bound(m, v);
    require_grid(m, "the inequality check");
    const int n = m.node_count();
    const double mm = m.synthetic_dimension();
    const double mn = mm - m.dimension();
    const auto hess = hessian(m, u.values());
    const auto du = coordinate_differential(m.geometry(), u.values());
    const auto dv = coordinate_differential(m.geometry(), v.values());
    const auto c = chi.values();
    const auto dchi = chi.partials();

    InequalityReport report;
    report.tolerance = tolerance;
    report.checks = {{"dimension"}, {"laplacian-cross"}, {"hessian-cross"}, {"hessian-cross-chi2"}, {"young"}};
    report.checks[3].enforced = false;

    auto record = [&](InequalityCheck& check, int node, double lhs, double rhs) {
        const double scale = std::abs(lhs) + std::abs(rhs);
        if (scale == 0.0) return;  // both sides vanish, e.g. outside supp chi
        const double rel = (lhs - rhs) / scale;
        if (check.witness_node < 0 || rel > check.max_violation) {
            check.max_violation = rel;
            check.witness_node = node;
        }
        if (rel > tolerance) ++check.violations;
    };

    for (int p = 0; p < n; ++p) {
        const Sym2 inv = m.inverse_metric(p);
        const Vec2 df = m.weight_gradient(p);
        const double h2 = norm_squared(inv, hess[p]);
        const double fu = contract(inv, df, du[p]);
        const double lap_f = trace(inv, hess[p]) - fu;
        const double gu2 = contract(inv, du[p], du[p]);
        const double gv2 = contract(inv, dv[p], dv[p]);
        const double gchi2 = contract(inv, dchi[p], dchi[p]);
        const double uchi = contract(inv, du[p], dchi[p]);
        const double hcu = apply(hess[p], raise(inv, dchi[p]), raise(inv, du[p]));
        const double x = c[p];
        const double x2 = x * x;

        record(report.checks[0], p, lap_f * lap_f / mm, h2 + fu * fu / mn);
        record(report.checks[1], p, 4.0 * x2 * x * lap_f * uchi,
               16.0 * mm * x2 * gu2 * gchi2 + x2 * x2 * h2 + 2.0 * x2 * x2 * fu * fu / mn);
        record(report.checks[2], p, -8.0 * x2 * x * hcu, 16.0 * x2 * gu2 * gchi2 + x2 * x2 * h2);
        record(report.checks[3], p, -8.0 * x2 * hcu, 16.0 * x2 * gu2 * gchi2 + x2 * x2 * h2);
        const double a = std::sqrt(gu2);
        const double b = std::sqrt(gv2);
        record(report.checks[4], p, 2.0 * a * b, 0.5 * a * a + 2.0 * b * b);
    }
    return report;
}

}  // namespace bernstein
