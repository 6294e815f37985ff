#pragma once

#include "bernstein/manifold.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bernstein {

enum class CutoffRegion { whole, ball, annulus };

std::string to_string(CutoffRegion region);
CutoffRegion parse_cutoff_region(std::string_view text);

/// Support description of the cutoff chi.
///
/// The profile is the polynomial bump (1 - s^2)^degree of a unit parameter s:
/// s = r / radius on a ball, s = (r - r_mid) / half_width on an annulus,
/// where r is the (periodic, geodesic or graph-coordinate) distance to
/// `center`. Degree 3 is the smallest that is C^2 across the support edge.
struct CutoffDescription {
    CutoffRegion region = CutoffRegion::whole;
    Vec2 center{};
    double radius = 1.0;        // ball radius / annulus outer radius
    double inner_radius = 0.0;  // annulus only
    int degree = 3;
};

class CutoffProfile {
public:
    CutoffProfile(CutoffDescription description, std::vector<double> values, std::vector<Vec2> partials,
                  std::vector<double> background_laplacian, std::vector<char> region, std::vector<char> boundary);

    const CutoffDescription& description() const { return description_; }
    bool whole_manifold() const { return description_.region == CutoffRegion::whole; }

    std::span<const double> values() const { return values_; }
    /// Coordinate partials of chi (grids).
    std::span<const Vec2> partials() const { return partials_; }
    /// Laplacian of chi under the background metric g0.
    std::span<const double> background_laplacian() const { return background_laplacian_; }
    /// Omega: nodes with s <= 1 (all nodes for a whole-manifold cutoff).
    std::span<const char> region() const { return region_; }
    /// Nodes of Omega with a stencil neighbour outside Omega.
    std::span<const char> region_boundary() const { return boundary_; }

    double max_value() const;

    /// |grad chi|^2 under the snapshot metric (graphs: carre du champ).
    std::vector<double> gradient_norm_squared(const DiscreteManifold& manifold) const;
    /// Delta chi under the snapshot metric.
    std::vector<double> laplacian(const DiscreteManifold& manifold) const;
    /// Delta_f chi = Delta chi - <grad f, grad chi>.
    std::vector<double> weighted_laplacian(const DiscreteManifold& manifold) const;

private:
    CutoffDescription description_;
    std::vector<double> values_;
    std::vector<Vec2> partials_;
    std::vector<double> background_laplacian_;
    std::vector<char> region_;
    std::vector<char> boundary_;
};

CutoffProfile build_cutoff(const DiscreteManifold& manifold, const CutoffDescription& description);

/// Radial bump (1 - s^2)^p and its first two derivatives in s.
struct BumpSample {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};
BumpSample polynomial_bump(double s, int degree);

}  // namespace bernstein
