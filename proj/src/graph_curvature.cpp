#include "bernstein/graph_curvature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace bernstein {

std::vector<double> graph_gamma(const Geometry& g, std::span<const double> u) {
    std::vector<double> out(g.node_count, 0.0);
    for (int x = 0; x < g.node_count; ++x) {
        double acc = 0.0;
        for (const auto& [y, w] : g.adjacency[x]) acc += w * (u[y] - u[x]) * (u[y] - u[x]);
        out[x] = 0.5 * acc;
    }
    return out;
}

double graph_bakry_emery_curvature(const Geometry& g, int node, double m) {
    // Local indices for the 2-ball around node.
    std::map<int, int> local;
    auto add = [&](int v) { local.emplace(v, int(local.size())); };
    add(node);
    for (const auto& [y, w] : g.adjacency[node]) add(y);
    for (const auto& [y, w] : g.adjacency[node]) {
        for (const auto& [z, w2] : g.adjacency[y]) add(z);
    }
    const int s = int(local.size());
    using Mat = Eigen::MatrixXd;
    using Vec = Eigen::VectorXd;

    auto gamma_form = [&](int z) {
        Mat out = Mat::Zero(s, s);
        const int iz = local.at(z);
        for (const auto& [y, w] : g.adjacency[z]) {
            Vec e = Vec::Zero(s);
            e[local.at(y)] += 1.0;
            e[iz] -= 1.0;
            out += 0.5 * w * e * e.transpose();
        }
        return out;
    };
    auto laplacian_row = [&](int z) {
        Vec out = Vec::Zero(s);
        const int iz = local.at(z);
        for (const auto& [y, w] : g.adjacency[z]) {
            out[local.at(y)] += w;
            out[iz] -= w;
        }
        return out;
    };

    const int ix = local.at(node);
    const Mat mx = gamma_form(node);
    const Vec lx = laplacian_row(node);
    Mat a = Mat::Zero(s, s);
    Mat cross = Mat::Zero(s, s);
    for (const auto& [y, w] : g.adjacency[node]) {
        a += 0.5 * w * (gamma_form(y) - mx);
        Vec e = Vec::Zero(s);
        e[local.at(y)] += 1.0;
        e[ix] -= 1.0;
        cross += 0.5 * w * e * (laplacian_row(y) - lx).transpose();
    }
    a -= 0.5 * (cross + cross.transpose());
    a -= (1.0 / m) * lx * lx.transpose();

    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff() + mx.cwiseAbs().maxCoeff());
    const double tol = 1e-12 * scale;
    auto feasible = [&](double kappa) {
        Eigen::SelfAdjointEigenSolver<Mat> solver(a - kappa * mx, Eigen::EigenvaluesOnly);
        return solver.eigenvalues()[0] >= -tol;
    };

    double lo = -1.0;
    while (!feasible(lo)) {
        lo *= 2.0;
        if (lo < -1e12) return -std::numeric_limits<double>::infinity();
    }
    double hi = 1.0;
    while (feasible(hi)) {
        hi *= 2.0;
        if (hi > 1e12) return std::numeric_limits<double>::infinity();
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace bernstein
