#pragma once

#include "bernstein/cutoff.hpp"
#include "bernstein/manifold.hpp"

#include <span>
#include <string>
#include <vector>

namespace bernstein {

/// Node values bound to one metric snapshot (identified by its time stamp).
/// Every metric-dependent operation checks that the snapshot it is given is
/// the one the field was bound to.
class ScalarField {
public:
    ScalarField(const DiscreteManifold& manifold, std::vector<double> values, std::string name = {});

    std::span<const double> values() const { return values_; }
    const std::string& name() const { return name_; }
    double metric_time() const { return metric_time_; }
    int size() const { return int(values_.size()); }
    double operator[](int node) const { return values_[node]; }

private:
    std::vector<double> values_;
    std::string name_;
    double metric_time_;
};

/// Throws InvalidInput if `field` was not bound to `manifold`'s snapshot.
void require_bound(const DiscreteManifold& manifold, const ScalarField& field);

struct GradientField {
    std::vector<Vec2> differential;  // coordinate partials du
    std::vector<Vec2> vector;        // g^{-1} du
    double metric_time = 0.0;
};

struct HessianField {
    std::vector<Sym2> components;  // covariant, lower indices
    double metric_time = 0.0;
};

GradientField gradient(const DiscreteManifold& manifold, const ScalarField& u);
/// |grad u|^2_g per node (graphs: carre du champ).
std::vector<double> gradient_norm_squared(const DiscreteManifold& manifold, const ScalarField& u);
/// <grad u, grad v>_g per node (graphs: polarised carre du champ).
std::vector<double> gradient_inner(const DiscreteManifold& manifold, const ScalarField& u, const ScalarField& v);

ScalarField laplacian(const DiscreteManifold& manifold, const ScalarField& u);
/// Delta_f u = Delta u - <grad f, grad u>, drift from the analytic grad f.
ScalarField weighted_laplacian(const DiscreteManifold& manifold, const ScalarField& u);
/// Covariant Hessian d^2 u - Gamma^k du_k. Grids only.
HessianField hessian(const DiscreteManifold& manifold, const ScalarField& u);

/// Delta_f(u^2) - 2|grad u|^2 - 2 u Delta_f u.
ScalarField delta_f_square_residual(const DiscreteManifold& manifold, const ScalarField& u);
/// 1/2 Delta_f |grad u|^2 - |Hess u|^2 - <grad u, grad Delta_f u> - (Ric + Hess f)(grad u, grad u).
ScalarField bochner_residual(const DiscreteManifold& manifold, const ScalarField& u);

// Span overloads used by the solver; the caller guarantees the values belong
// to the given snapshot.
std::vector<Vec2> coordinate_differential(const Geometry& geometry, std::span<const double> u);
std::vector<double> gradient_norm_squared(const DiscreteManifold& manifold, std::span<const double> u);
std::vector<double> gradient_inner(const DiscreteManifold& manifold, std::span<const double> u,
                                   std::span<const double> v);
std::vector<double> weighted_laplacian(const DiscreteManifold& manifold, std::span<const double> u);
std::vector<Sym2> hessian(const DiscreteManifold& manifold, std::span<const double> u);

struct InequalityCheck {
    std::string name;
    double max_violation = 0.0;  // max over nodes of (lhs - rhs) / local scale
    int witness_node = -1;
    int violations = 0;          // nodes with relative violation above the tolerance
    bool enforced = true;        // false: reported only
};

struct InequalityReport {
    std::vector<InequalityCheck> checks;
    double tolerance = 1e-10;

    bool holds() const;
    const InequalityCheck& find(const std::string& name) const;
};

/// Node-wise evaluation of the pointwise inequalities used to close the
/// gradient estimate:
///   dimension:        (1/m)(Delta_f u)^2 <= |Hess u|^2 + <grad f, grad u>^2 / (m - n)
///   laplacian-cross:  4 chi^3 Delta_f u <grad u, grad chi>
///                       <= 16 m chi^2 |grad u|^2 |grad chi|^2 + chi^4 |Hess u|^2
///                          + 2 chi^4 <grad f, grad u>^2 / (m - n)
///   hessian-cross:    -8 chi^3 Hess u(grad chi, grad u)
///                       <= 16 chi^2 |grad u|^2 |grad chi|^2 + chi^4 |Hess u|^2
///   hessian-cross-chi2 (reported only): the same with -8 chi^2 on the left;
///                       it fails wherever chi < 1 and |Hess u| dominates
///   young:            2 |grad u||grad v| <= |grad u|^2 / 2 + 2 |grad v|^2
/// Delta_f u is taken as tr_g Hess u - <grad f, grad u> so the algebra is
/// exact node by node. Grids only.
InequalityReport proof_inequalities_check(const DiscreteManifold& manifold, const ScalarField& u,
                                          const ScalarField& v, const CutoffProfile& chi,
                                          double tolerance = 1e-10);

/// a^2/2 + 2 b^2 - 2 a b, never negative.
inline double young_slack(double a, double b) { return 0.5 * a * a + 2.0 * b * b - 2.0 * a * b; }

}  // namespace bernstein
