#pragma once

#include "bernstein/tensor2.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bernstein {

/// Row-major sparse operator acting on node vectors.
using SparseOp = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class ManifoldKind { torus, sphere, flat_patch, weighted_graph };

std::string to_string(ManifoldKind kind);
ManifoldKind parse_manifold_kind(std::string_view text);

enum class WeightKind { zero, linear, sine, radial_gaussian };

std::string to_string(WeightKind kind);
WeightKind parse_weight_kind(std::string_view text);

/// Catalog entry for the weight f of the measure e^{-f} dmu.
///
///  - zero:            f = 0
///  - linear:          f = amplitude * q[axis] on a flat patch; on the sphere
///                     f = amplitude * X[axis] with X the ambient embedding
///  - sine:            f = amplitude * sin(wavenumber * q[axis])
///  - radial_gaussian: f = amplitude * exp(-|q - center|^2 / (2 width^2))
struct WeightSpec {
    WeightKind kind = WeightKind::zero;
    double amplitude = 0.0;
    int axis = 0;
    double wavenumber = 1.0;
    Vec2 center{};
    double width = 1.0;
};

/// Certified bounds |grad f| <= gradient and Hess f >= -hessian * g.
struct WeightBounds {
    double gradient = 0.0;
    double hessian = 0.0;
};

struct WeightedEdge {
    int from = 0;
    int to = 0;
    double weight = 1.0;
};

/// Weighted graph input. With no explicit edges a ring lattice of `nodes`
/// vertices on a circle of length `side` is built, with edge weights 1/h^2.
struct GraphDescription {
    int nodes = 64;
    int dimension = 1;
    double side = 2.0 * std::numbers::pi;
    std::vector<WeightedEdge> edges;
    std::vector<double> coordinates;
};

struct ManifoldDescription {
    ManifoldKind kind = ManifoldKind::torus;
    std::array<int, 2> resolution{64, 64};
    double side = 2.0 * std::numbers::pi;  // torus period / patch width
    double radius = 1.0;                   // sphere
    double synthetic_dimension = 4.0;      // m, must exceed the dimension n
    WeightSpec weight;
    GraphDescription graph;
};

struct GridAxis {
    int count = 0;
    double origin = 0.0;
    double spacing = 0.0;
    bool periodic = false;
};

/// Christoffel symbols Gamma^k_ij, one symmetric matrix per upper index k.
using Christoffel = std::array<Sym2, 2>;

/// Immutable data shared by every metric snapshot of one manifold:
/// node layout, background metric g0, weight samples and the sparse
/// difference operators.
///
/// Grids carry a conformal metric g = e^{2 phi} g0 (phi lives on the
/// snapshot). On a sphere the grid is latitude/longitude with cell-centred
/// colatitudes; stencils reach across a pole by reflecting to the opposite
/// meridian.
struct Geometry {
    ManifoldKind kind = ManifoldKind::torus;
    int dimension = 2;
    int node_count = 0;
    std::array<GridAxis, 2> axes{};
    double radius = 1.0;
    double side = 0.0;

    std::vector<Vec2> coords;
    std::vector<Sym2> g0;
    std::vector<Sym2> g0_inv;
    std::vector<double> g0_min_eigenvalue;
    std::vector<Christoffel> christoffel0;
    std::vector<double> k0;  // Gaussian curvature of g0

    std::vector<double> f;
    std::vector<Vec2> df;    // coordinate partials of f
    std::vector<Sym2> ddf;   // coordinate second partials of f

    // Stencil neighbours (axis0-, axis0+, axis1-, axis1+); -1 where absent.
    // For graphs the adjacency below is used instead.
    std::vector<std::array<int, 4>> neighbors;

    SparseOp d0, d1;         // first coordinate derivatives
    SparseOp d00, d11, d01;  // second coordinate derivatives
    SparseOp lap0;           // Laplace-Beltrami of g0 (graphs: unweighted graph Laplacian)
    SparseOp lap0_f;         // lap0 minus g0-drift of f (graphs: weighted graph Laplacian)

    // Graphs: out-edges with drift-adjusted weights w_xy exp((f_x - f_y)/2).
    std::vector<std::vector<std::pair<int, double>>> adjacency;

    bool is_graph() const { return kind == ManifoldKind::weighted_graph; }
    bool is_closed() const { return kind != ManifoldKind::flat_patch; }
    int index(int i0, int i1) const { return i1 * axes[0].count + i0; }
};

/// Per-node curvature of one snapshot.
struct CurvatureData {
    std::vector<double> gaussian;             // grids only
    std::vector<Sym2> ricci;                  // grids only (= gaussian * g)
    std::vector<Sym2> bakry_emery;            // Ric + Hess f - df (x) df / (m - n), grids only
    std::vector<double> bakry_emery_min_eig;  // smallest eigenvalue relative to g (graphs: local CD curvature)
    double lower_bound = 0.0;                 // K >= 0 with Ric_f^{m-n} >= -K g at every node
    int witness_node = -1;
};

/// A weighted manifold snapshot. Values are immutable; flow steps return
/// new snapshots sharing the same Geometry.
class DiscreteManifold {
public:
    DiscreteManifold(std::shared_ptr<const Geometry> geometry, double synthetic_dimension, WeightSpec weight,
                     WeightBounds weight_bounds, std::vector<double> conformal, double time);

    ManifoldKind kind() const { return geometry_->kind; }
    int node_count() const { return geometry_->node_count; }
    int dimension() const { return geometry_->dimension; }
    double synthetic_dimension() const { return synthetic_dimension_; }
    double time() const { return time_; }
    bool is_graph() const { return geometry_->is_graph(); }
    bool is_closed() const { return geometry_->is_closed(); }

    const Geometry& geometry() const { return *geometry_; }
    const std::shared_ptr<const Geometry>& shared_geometry() const { return geometry_; }

    const WeightSpec& weight() const { return weight_; }
    /// Bounds certified for the metric at construction time.
    const WeightBounds& weight_bounds() const { return weight_bounds_; }

    std::span<const double> conformal_factor() const { return conformal_; }
    /// e^{-2 phi} per node.
    std::span<const double> inverse_scale() const { return inverse_scale_; }

    Sym2 metric(int node) const;
    Sym2 inverse_metric(int node) const;
    Christoffel christoffel(int node) const;
    double metric_min_eigenvalue() const;

    Vec2 weight_gradient(int node) const { return geometry_->df[node]; }
    /// Covariant Hessian of f with respect to this snapshot's metric.
    Sym2 weight_hessian(int node) const;

    const CurvatureData& curvature() const { return curvature_; }

    DiscreteManifold with_conformal_factor(std::vector<double> conformal, double time) const;

private:
    std::shared_ptr<const Geometry> geometry_;
    double synthetic_dimension_;
    WeightSpec weight_;
    WeightBounds weight_bounds_;
    std::vector<double> conformal_;
    std::vector<double> inverse_scale_;
    std::vector<Vec2> conformal_gradient_;
    double time_;
    CurvatureData curvature_;
};

DiscreteManifold build_manifold(const ManifoldDescription& description);

/// Closed-form bounds for the catalog weight on the background metric.
WeightBounds analytic_weight_bounds(const WeightSpec& weight, ManifoldKind kind, double radius);

/// Node-wise sup of |grad f|_g and of max(0, -lambda_min(g^{-1} Hess_g f)).
WeightBounds measure_weight_bounds(const DiscreteManifold& manifold);

class CutoffProfile;

/// One RK4 step of the local Ricci flow dg/dt = -2 chi^2 Ric, written for the
/// conformal factor as d(phi)/dt = -chi^2 e^{-2 phi} (K0 - Lap0 phi).
/// Throws MetricDegeneration if the metric loses positive definiteness.
DiscreteManifold evolve_metric(const DiscreteManifold& manifold, const CutoffProfile& chi, double dt);

/// Right-hand side of the conformal-factor flow at the given phi.
void conformal_flow_rhs(const Geometry& geometry, std::span<const double> chi, std::span<const double> phi,
                        std::span<double> out);

/// out_i = sum_{j != i} op_ij (u_j - u_i). Every operator built here has zero
/// row sums, so this equals op * u while returning exact zeros on constants.
void apply_difference(const SparseOp& op, std::span<const double> u, std::span<double> out);
std::vector<double> apply_difference(const SparseOp& op, std::span<const double> u);

/// Gaussian curvature of e^{2 phi} g0 per node.
std::vector<double> gaussian_curvature(const Geometry& geometry, std::span<const double> phi);

/// Smallest metric eigenvalue below which the flow is declared degenerate.
inline constexpr double kMetricDegenerationThreshold = 1e-8;

}  // namespace bernstein
