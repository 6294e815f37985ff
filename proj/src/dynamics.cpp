#include "bernstein/dynamics.hpp"

#include "bernstein/calculus.hpp"
#include "bernstein/error.hpp"
#include "bernstein/graph_curvature.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <memory>

namespace bernstein {
namespace {

constexpr double kPositivityTolerance = 1e-10;

struct Rates {
    std::vector<double> u, v, phi;
};

// chi^2 e^{-2 phi} per node; exact zero where chi = 0.
std::vector<double> diffusion_coefficient(const DiscreteManifold& m, const CutoffProfile& chi,
                                          std::span<const double> phi) {
    const auto c = chi.values();
    std::vector<double> out(c.size());
    for (std::size_t p = 0; p < c.size(); ++p) {
        out[p] = m.is_graph() ? c[p] * c[p] : c[p] * c[p] * std::exp(-2.0 * phi[p]);
    }
    return out;
}

void evaluate_rates(const DiscreteManifold& m, const CutoffProfile& chi, const SystemSpec& spec, Flow flow,
                    std::span<const double> u, std::span<const double> v, std::span<const double> phi, Rates& out) {
    const Geometry& g = m.geometry();
    const int n = g.node_count;
    out.u.resize(n);
    out.v.resize(n);
    out.phi.assign(n, 0.0);
    apply_difference(g.lap0_f, u, out.u);
    apply_difference(g.lap0_f, v, out.v);
    const auto c = diffusion_coefficient(m, chi, phi);
    for (int p = 0; p < n; ++p) {
        const Reaction r = reaction(spec, u[p], v[p]);
        out.u[p] = c[p] * out.u[p] + r.lambda1;
        out.v[p] = c[p] * out.v[p] + r.lambda2;
    }
    if (flow == Flow::local_ricci) conformal_flow_rhs(g, chi.values(), phi, out.phi);
}

void check_finite(const SystemState& s) {
    for (std::size_t p = 0; p < s.u.size(); ++p) {
        if (!std::isfinite(s.u[p])) throw NonFiniteField("u", int(p), s.t);
        if (!std::isfinite(s.v[p])) throw NonFiniteField("v", int(p), s.t);
        if (!std::isfinite(s.phi[p])) throw NonFiniteField("phi", int(p), s.t);
    }
}

double metric_min_eig(const Geometry& g, std::span<const double> phi) {
    if (g.is_graph()) return 1.0;
    double out = std::numeric_limits<double>::infinity();
    for (int p = 0; p < g.node_count; ++p) out = std::min(out, g.g0_min_eigenvalue[p] * std::exp(2.0 * phi[p]));
    return out;
}

SystemState rk4_step(const SystemState& s, const DiscreteManifold& m, const CutoffProfile& chi,
                     const SystemSpec& spec, Flow flow, double dt) {
    const int n = m.node_count();
    Rates k1, k2, k3, k4;
    SystemState stage = s;
    auto advance = [&](const Rates& k, double w) {
        for (int p = 0; p < n; ++p) {
            stage.u[p] = s.u[p] + w * k.u[p];
            stage.v[p] = s.v[p] + w * k.v[p];
            stage.phi[p] = s.phi[p] + w * k.phi[p];
        }
    };
    evaluate_rates(m, chi, spec, flow, s.u, s.v, s.phi, k1);
    advance(k1, 0.5 * dt);
    evaluate_rates(m, chi, spec, flow, stage.u, stage.v, stage.phi, k2);
    advance(k2, 0.5 * dt);
    evaluate_rates(m, chi, spec, flow, stage.u, stage.v, stage.phi, k3);
    advance(k3, dt);
    evaluate_rates(m, chi, spec, flow, stage.u, stage.v, stage.phi, k4);
    SystemState out = s;
    out.t = s.t + dt;
    const double w = dt / 6.0;
    for (int p = 0; p < n; ++p) {
        out.u[p] = s.u[p] + w * (k1.u[p] + 2.0 * k2.u[p] + 2.0 * k3.u[p] + k4.u[p]);
        out.v[p] = s.v[p] + w * (k1.v[p] + 2.0 * k2.v[p] + 2.0 * k3.v[p] + k4.v[p]);
        out.phi[p] = s.phi[p] + w * (k1.phi[p] + 2.0 * k2.phi[p] + 2.0 * k3.phi[p] + k4.phi[p]);
    }
    return out;
}

// Backward Euler for the diffusion, forward Euler for the reaction.
class ImexSolver {
public:
    ImexSolver(const DiscreteManifold& m, const CutoffProfile& chi, double dt) : dt_(dt) {
        const Geometry& g = m.geometry();
        const std::vector<double> zero(g.node_count, 0.0);
        const auto c = diffusion_coefficient(m, chi, zero);
        Eigen::SparseMatrix<double> a = g.lap0_f;
        for (int k = 0; k < a.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) it.valueRef() *= -dt * c[it.row()];
        }
        Eigen::SparseMatrix<double> id(g.node_count, g.node_count);
        id.setIdentity();
        a += id;
        a.makeCompressed();
        lu_.compute(a);
        if (lu_.info() != Eigen::Success) throw std::runtime_error("implicit step: factorisation failed");
    }

    double dt() const { return dt_; }

    SystemState step(const SystemState& s, const SystemSpec& spec) {
        const int n = int(s.u.size());
        Eigen::VectorXd ru(n), rv(n);
        for (int p = 0; p < n; ++p) {
            const Reaction r = reaction(spec, s.u[p], s.v[p]);
            ru[p] = s.u[p] + dt_ * r.lambda1;
            rv[p] = s.v[p] + dt_ * r.lambda2;
        }
        const Eigen::VectorXd u = lu_.solve(ru);
        const Eigen::VectorXd v = lu_.solve(rv);
        SystemState out = s;
        out.t = s.t + dt_;
        out.u.assign(u.data(), u.data() + n);
        out.v.assign(v.data(), v.data() + n);
        return out;
    }

private:
    double dt_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

void validate_spec(const DiscreteManifold& m, const SystemSpec& spec, Flow flow) {
    const auto n = std::size_t(m.node_count());
    if (spec.u0.size() != n || spec.v0.size() != n) throw InvalidInput("initial data size does not match node count");
    if (!(spec.T > 0.0)) throw InvalidInput("horizon T must be positive");
    if (spec.snapshots < 1) throw InvalidInput("need at least one snapshot interval");
    if (!(spec.cfl > 0.0)) throw InvalidInput("cfl factor must be positive");
    if (spec.dt < 0.0) throw InvalidInput("dt must be non-negative");
    if (spec.kind == SystemKind::exponential && !(spec.a < 0.0 && spec.b < 0.0)) {
        throw InvalidInput("exponential system requires a < 0 and b < 0");
    }
    if (flow == Flow::local_ricci) {
        if (m.is_graph()) throw UnsupportedGeometry("local Ricci flow needs a two-dimensional grid");
        if (spec.stepper == Stepper::implicit_euler) {
            throw InvalidInput("implicit-euler stepping is only available on static metrics");
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (!std::isfinite(spec.u0[p])) throw NonFiniteField("u0", int(p), 0.0);
        if (!std::isfinite(spec.v0[p])) throw NonFiniteField("v0", int(p), 0.0);
    }
}

}  // namespace

std::string to_string(SystemKind kind) { return kind == SystemKind::linear ? "linear" : "exponential"; }
std::string to_string(Stepper stepper) { return stepper == Stepper::rk4 ? "explicit-rk4" : "implicit-euler"; }
std::string to_string(Flow flow) { return flow == Flow::none ? "none" : "local-ricci"; }

SystemKind parse_system_kind(std::string_view text) {
    if (text == "linear") return SystemKind::linear;
    if (text == "exponential") return SystemKind::exponential;
    throw InvalidInput("unknown system '" + std::string(text) + "'");
}

Stepper parse_stepper(std::string_view text) {
    if (text == "explicit-rk4" || text == "rk4") return Stepper::rk4;
    if (text == "implicit-euler") return Stepper::implicit_euler;
    throw InvalidInput("unknown stepper '" + std::string(text) + "'");
}

Flow parse_flow(std::string_view text) {
    if (text == "none") return Flow::none;
    if (text == "local-ricci") return Flow::local_ricci;
    throw InvalidInput("unknown flow '" + std::string(text) + "'");
}

Reaction reaction(const SystemSpec& spec, double u, double v) {
    if (spec.kind == SystemKind::linear) return {-v, -u, 0.0, -1.0};
    const double ev = std::exp(v);
    return {spec.a * ev, spec.b * std::exp(u), 0.0, spec.a * ev};
}

StepDiagnostics diagnose(const DiscreteManifold& m, const CutoffProfile& chi, const SystemState& s) {
    StepDiagnostics d;
    d.t = s.t;
    const auto [umin, umax] = std::minmax_element(s.u.begin(), s.u.end());
    const auto [vmin, vmax] = std::minmax_element(s.v.begin(), s.v.end());
    d.min_u = *umin;
    d.max_u = *umax;
    d.min_v = *vmin;
    d.max_v = *vmax;
    d.metric_min_eig = metric_min_eig(m.geometry(), s.phi);

    const Geometry& g = m.geometry();
    const int n = g.node_count;
    std::vector<double> gu, gv;
    if (g.is_graph()) {
        gu = graph_gamma(g, s.u);
        gv = graph_gamma(g, s.v);
    } else {
        const auto du = coordinate_differential(g, s.u);
        const auto dv = coordinate_differential(g, s.v);
        gu.resize(n);
        gv.resize(n);
        for (int p = 0; p < n; ++p) {
            const double scale = std::exp(-2.0 * s.phi[p]);
            gu[p] = scale * contract(g.g0_inv[p], du[p], du[p]);
            gv[p] = scale * contract(g.g0_inv[p], dv[p], dv[p]);
        }
    }
    const auto c = chi.values();
    const auto region = chi.region();
    for (int p = 0; p < n; ++p) {
        if (!region[p]) continue;
        const double w = c[p] * c[p] * s.t;
        d.max_chi2t_grad_u2 = std::max(d.max_chi2t_grad_u2, w * gu[p]);
        d.max_chi2t_grad_v2 = std::max(d.max_chi2t_grad_v2, w * gv[p]);
    }
    return d;
}

double Trajectory::hypothesis_time() const { return std::min(positivity_loss_time, cap_violation_time); }

DiscreteManifold Trajectory::manifold_at(std::size_t i) const {
    return initial.with_conformal_factor(snapshots.at(i).phi, snapshots.at(i).t);
}

std::vector<DiscreteManifold> Trajectory::snapshot_manifolds() const {
    std::vector<DiscreteManifold> out;
    out.reserve(snapshots.size());
    for (std::size_t i = 0; i < snapshots.size(); ++i) out.push_back(manifold_at(i));
    return out;
}

double stable_time_step(const DiscreteManifold& m, const CutoffProfile& chi, std::span<const double> phi, double cfl,
                        Flow flow) {
    const Geometry& g = m.geometry();
    const auto c = diffusion_coefficient(m, chi, phi);
    auto row_abs = [](const SparseOp& op, int row) {
        double s = 0.0;
        for (SparseOp::InnerIterator it(op, row); it; ++it) s += std::abs(it.value());
        return s;
    };
    double rho = 0.0;
    for (int p = 0; p < g.node_count; ++p) {
        if (c[p] == 0.0) continue;
        double r = row_abs(g.lap0_f, p);
        if (flow == Flow::local_ricci) r = std::max(r, row_abs(g.lap0, p));
        rho = std::max(rho, c[p] * r);
    }
    return rho > 0.0 ? cfl * 8.0 / rho : std::numeric_limits<double>::infinity();
}

SystemState step_system(const SystemState& s, const DiscreteManifold& m, const CutoffProfile& chi,
                        const SystemSpec& spec, Flow flow, double dt) {
    SystemState out;
    if (spec.stepper == Stepper::implicit_euler) {
        if (flow == Flow::local_ricci) throw InvalidInput("implicit-euler stepping is only available on static metrics");
        ImexSolver solver(m, chi, dt);
        out = solver.step(s, spec);
    } else {
        out = rk4_step(s, m, chi, spec, flow, dt);
    }
    check_finite(out);
    return out;
}

Trajectory solve_trajectory(const DiscreteManifold& m, const CutoffProfile& chi, const SystemSpec& spec, Flow flow) {
    validate_spec(m, spec, flow);
    Trajectory traj{m, spec, flow};
    const int n = m.node_count();
    SystemState state{0.0, spec.u0, spec.v0, std::vector<double>(m.conformal_factor().begin(), m.conformal_factor().end())};
    if (m.is_graph()) state.phi.assign(n, 0.0);

    const double log_b1 = std::log(spec.b1);
    const double log_b2 = std::log(spec.b2);
    auto monitor = [&](const StepDiagnostics& d) {
        if (traj.positivity_loss_time == std::numeric_limits<double>::infinity() &&
            (d.min_u < -kPositivityTolerance || d.min_v < -kPositivityTolerance)) {
            traj.positivity_loss_time = d.t;
        }
        if (spec.kind == SystemKind::exponential &&
            traj.cap_violation_time == std::numeric_limits<double>::infinity() &&
            (d.max_u > log_b1 + kPositivityTolerance || d.max_v > log_b2 + kPositivityTolerance)) {
            traj.cap_violation_time = d.t;
        }
    };

    traj.snapshots.push_back({0.0, state.u, state.v, state.phi});
    traj.diagnostics.push_back(diagnose(m, chi, state));
    monitor(traj.diagnostics.back());

    std::unique_ptr<ImexSolver> imex;
    for (int k = 1; k <= spec.snapshots && !traj.truncated; ++k) {
        const double target = spec.T * k / spec.snapshots;
        const double interval = target - state.t;
        double dt_max = spec.dt;
        if (dt_max == 0.0) {
            dt_max = spec.stepper == Stepper::rk4 ? stable_time_step(m, chi, state.phi, spec.cfl, flow)
                                                  : interval / 8.0;
        }
        const int substeps = std::max(1, int(std::ceil(interval / dt_max - 1e-9)));
        const double dt = interval / substeps;
        if (spec.stepper == Stepper::implicit_euler && (!imex || std::abs(imex->dt() - dt) > 1e-14 * dt)) {
            imex = std::make_unique<ImexSolver>(m, chi, dt);
        }
        for (int s = 0; s < substeps; ++s) {
            state = imex ? imex->step(state, spec) : rk4_step(state, m, chi, spec, flow, dt);
            if (s == substeps - 1) state.t = target;
            check_finite(state);
            traj.diagnostics.push_back(diagnose(m, chi, state));
            const StepDiagnostics& d = traj.diagnostics.back();
            if (flow == Flow::local_ricci && d.metric_min_eig < kMetricDegenerationThreshold) {
                throw MetricDegeneration(state.t, d.metric_min_eig);
            }
            monitor(d);
            if (spec.stop_at_positivity_loss && traj.hypothesis_time() <= state.t) {
                traj.truncated = true;
                break;
            }
        }
        traj.snapshots.push_back({state.t, state.u, state.v, state.phi});
    }
    return traj;
}

double ResidualSeries::max_residual() const {
    double out = 0.0;
    for (double r : sup_residual) out = std::max(out, r);
    return out;
}

ResidualSeries lemma_evolution_residual(const Trajectory& traj, const CutoffProfile& chi, FlowTensor h) {
    if (traj.initial.is_graph()) throw UnsupportedGeometry("the evolution residual needs Hessians (grids only)");
    if (traj.snapshots.size() < 3) throw InvalidInput("snapshot cadence too coarse for centred time differences");
    const auto manifolds = traj.snapshot_manifolds();
    const int n = traj.initial.node_count();
    const auto c = chi.values();
    const auto dchi = chi.partials();

    auto q_field = [&](std::size_t j) {
        auto g2 = gradient_norm_squared(manifolds[j], traj.snapshots[j].u);
        for (int p = 0; p < n; ++p) g2[p] *= c[p] * c[p];
        return g2;
    };

    ResidualSeries out;
    for (std::size_t k = 1; k + 1 < traj.snapshots.size(); ++k) {
        const double t0 = traj.snapshots[k - 1].t;
        const double t1 = traj.snapshots[k].t;
        const double t2 = traj.snapshots[k + 1].t;
        if (std::abs((t2 - t1) - (t1 - t0)) > 1e-9 * (t2 - t0)) continue;  // truncated tail
        const DiscreteManifold& m = manifolds[k];
        const auto& u = traj.snapshots[k].u;
        const auto& v = traj.snapshots[k].v;
        const auto q_prev = q_field(k - 1);
        const auto q_next = q_field(k + 1);
        const auto q = q_field(k);
        const auto lap_q = weighted_laplacian(m, q);
        const auto du = coordinate_differential(m.geometry(), u);
        const auto dv = coordinate_differential(m.geometry(), v);
        const auto hess = hessian(m, u);
        const auto lap_u = weighted_laplacian(m, u);
        const auto lap_chi = chi.weighted_laplacian(m);
        const auto& ricci = m.curvature().ricci;

        double sup = 0.0, scale = 0.0;
        for (int p = 0; p < n; ++p) {
            const double x = c[p];
            const double x2 = x * x;
            const Sym2 inv = m.inverse_metric(p);
            const Vec2 gu = raise(inv, du[p]);
            const Vec2 gchi = raise(inv, dchi[p]);
            const double gu2 = contract(inv, du[p], du[p]);
            const double gchi2 = contract(inv, dchi[p], dchi[p]);
            const Sym2 ht = h == FlowTensor::local_ricci ? x2 * ricci[p] : Sym2{};
            const Reaction r = reaction(traj.spec, u[p], v[p]);
            const double rhs = 2.0 * x2 * apply(ht - x2 * ricci[p], gu, gu) -
                               2.0 * x2 * x2 * apply(m.weight_hessian(p), gu, gu) -
                               2.0 * x2 * x2 * norm_squared(inv, hess[p]) +
                               4.0 * x2 * x * lap_u[p] * contract(inv, du[p], dchi[p]) -
                               2.0 * x2 * gu2 * (x * lap_chi[p] + gchi2) - 8.0 * x2 * x * apply(hess[p], gu, gchi) +
                               2.0 * x2 * (r.d1_du * gu2 + r.d1_dv * contract(inv, du[p], dv[p]));
            const double lhs = (q_next[p] - q_prev[p]) / (t2 - t0) - x2 * lap_q[p];
            sup = std::max(sup, std::abs(lhs - rhs));
            scale = std::max(scale, std::abs(lhs) + std::abs(rhs));
        }
        out.times.push_back(t1);
        out.sup_residual.push_back(sup);
        out.sup_scale.push_back(scale);
    }
    return out;
}

}  // namespace bernstein
