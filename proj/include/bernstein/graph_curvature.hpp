#pragma once

#include "bernstein/manifold.hpp"

#include <span>
#include <vector>

namespace bernstein {

/// Carre du champ Gamma(u)(x) = 1/2 sum_y w_xy (u_y - u_x)^2 with the
/// drift-adjusted weights of the graph.
std::vector<double> graph_gamma(const Geometry& geometry, std::span<const double> u);

/// Largest kappa with Gamma_2(u)(x) >= (1/m) (Delta_f u(x))^2 + kappa Gamma(u)(x)
/// for all u, i.e. the Bakry-Emery curvature-dimension constant CD(kappa, m)
/// at a vertex. Computed on the 2-ball around `node` by bisection on the
/// positive semidefiniteness of the local quadratic form.
double graph_bakry_emery_curvature(const Geometry& geometry, int node, double synthetic_dimension);

}  // namespace bernstein
