#include "bernstein/verify.hpp"

#include "bernstein/calculus.hpp"
#include "bernstein/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bernstein {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double grid_spacing(const Geometry& g) {
    if (g.is_graph()) return g.side / g.node_count;
    return std::max(g.axes[0].spacing, g.axes[1].spacing);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

// (d/dt - chi^2 Delta_f) G at snapshot k by a centred time difference.
std::vector<double> heat_operator(const std::vector<double>& g_prev, const std::vector<double>& g_mid,
                                  const std::vector<double>& g_next, double two_dt, const DiscreteManifold& m,
                                  std::span<const double> chi) {
    auto out = weighted_laplacian(m, g_mid);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = (g_next[p] - g_prev[p]) / two_dt - chi[p] * chi[p] * out[p];
    return out;
}

double aux_weight(const TheoremConstants& c) { return is_exponential(c.theorem) ? c.inputs.b2 * c.inputs.b2 : 1.0; }

}  // namespace

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::verified: return "verified";
        case Verdict::hypothesis_violated: return "hypothesis-violated";
        case Verdict::bound_violated: return "bound-violated";
    }
    return "?";
}

ConvergenceTrend fit_convergence(std::vector<int> levels, std::vector<double> spacings, std::vector<double> values) {
    ConvergenceTrend t;
    t.levels = std::move(levels);
    t.spacings = std::move(spacings);
    t.values = std::move(values);
    t.all_zero = std::all_of(t.values.begin(), t.values.end(), [](double v) { return v == 0.0; });
    t.monotone = true;
    for (std::size_t i = 1; i < t.values.size(); ++i) {
        if (t.values[i] > t.values[i - 1]) t.monotone = false;
    }
    if (t.all_zero) {
        t.fitted_order = kInf;
        return t;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        if (!(t.values[i] > 0.0)) continue;
        const double x = std::log(t.spacings[i]);
        const double y = std::log(t.values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    t.fitted_order = k >= 2 ? (k * sxy - sx * sy) / (k * sxx - sx * sx) : std::numeric_limits<double>::quiet_NaN();
    return t;
}

ConvergenceTrend run_convergence_study(const std::vector<int>& levels, const std::function<double(int)>& spacing,
                                       const std::function<double(int)>& measure) {
    if (levels.size() < 3) throw InvalidInput("a convergence study needs at least three levels");
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i] != 2 * levels[i - 1]) throw InvalidInput("convergence levels must be dyadic");
    }
    std::vector<double> h, v;
    for (int level : levels) {
        h.push_back(spacing(level));
        v.push_back(measure(level));
    }
    return fit_convergence(levels, std::move(h), std::move(v));
}

double relative_margin(double observed, double bound) {
    if (bound > 0.0) return observed / bound - 1.0;
    return observed == 0.0 ? -1.0 : kInf;
}

bool TheoremReport::blocking_gates_pass() const {
    return std::all_of(gates.begin(), gates.end(), [](const GateCheck& g) { return g.passed || !g.blocking; });
}

void require_matching_configuration(TheoremId theorem, const Trajectory& traj) {
    const bool exp = traj.spec.kind == SystemKind::exponential;
    const bool flowing = traj.flow == Flow::local_ricci;
    if (is_exponential(theorem) != exp) {
        throw InvalidInput(to_string(theorem) + " requires the " + (is_exponential(theorem) ? "exponential" : "linear") +
                           " system");
    }
    if (is_evolving(theorem) != flowing) {
        throw InvalidInput(to_string(theorem) + (is_evolving(theorem) ? " requires local Ricci flow"
                                                                      : " requires a static metric (flow = none)"));
    }
}

TheoremReport check_bernstein(const Trajectory& traj, const TheoremConstants& consts, double slack) {
    require_matching_configuration(consts.theorem, traj);
    TheoremReport r;
    r.theorem = consts.theorem;
    r.constants = consts;
    r.gates = consts.gates;
    r.bound_u = consts.bound_u;
    r.bound_v = consts.bound_v;
    r.slack = slack;
    r.notes = consts.notes;

    const double T = traj.spec.T;
    const double t_star = traj.hypothesis_time();
    r.window_restricted = t_star <= T;
    r.window_end = r.window_restricted ? t_star : T;
    {
        GateCheck g{"u, v >= 0 on [0, T]", traj.positivity_loss_time > T, "", -1, traj.positivity_loss_time, false};
        g.detail = g.passed ? "held to T = " + fmt(T) : "lost at t* = " + fmt(traj.positivity_loss_time);
        r.gates.push_back(g);
    }
    if (traj.spec.kind == SystemKind::exponential) {
        GateCheck g{"u <= ln b1, v <= ln b2 on [0, T]", traj.cap_violation_time > T, "", -1, traj.cap_violation_time,
                    false};
        g.detail = g.passed ? "held to T = " + fmt(T) : "violated at t = " + fmt(traj.cap_violation_time);
        r.gates.push_back(g);
    }
    if (r.window_restricted) r.notes.push_back("claims restricted to the hypothesis-valid window [0, " + fmt(t_star) + ")");

    for (const auto& d : traj.diagnostics) {
        const bool inside = d.t > 0.0 && d.t < t_star && d.t <= T * (1.0 + 1e-12);
        r.series.t.push_back(d.t);
        r.series.observed_u.push_back(d.max_chi2t_grad_u2);
        r.series.observed_v.push_back(d.max_chi2t_grad_v2);
        r.series.margin_u.push_back(relative_margin(d.max_chi2t_grad_u2, r.bound_u));
        r.series.margin_v.push_back(relative_margin(d.max_chi2t_grad_v2, r.bound_v));
        r.series.in_window.push_back(inside);
        if (!inside) continue;
        if (r.series.margin_u.back() > r.worst_margin_u) r.worst_margin_u = r.series.margin_u.back();
        if (r.series.margin_v.back() > r.worst_margin_v) r.worst_margin_v = r.series.margin_v.back();
        const double worst = std::max(r.series.margin_u.back(), r.series.margin_v.back());
        if (worst > r.worst_margin) {
            r.worst_margin = worst;
            r.worst_margin_time = d.t;
        }
    }
    const bool any_sample = std::any_of(r.series.in_window.begin(), r.series.in_window.end(), [](char c) { return c; });
    if (!r.blocking_gates_pass() || !any_sample) {
        r.verdict = Verdict::hypothesis_violated;
    } else if (r.worst_margin > slack) {
        r.verdict = Verdict::bound_violated;
    } else {
        r.verdict = Verdict::verified;
    }
    r.notes.push_back("discrete slack policy: observed <= bound * (1 + " + fmt(slack) +
                      "); the continuum estimate has no slack");
    return r;
}

std::vector<double> aux_function(const DiscreteManifold& m, const CutoffProfile& chi, const TheoremConstants& consts,
                                 const Snapshot& s) {
    const double T = consts.inputs.T;
    const double alpha = consts.max_u * T + 0.5;
    const double w = aux_weight(consts);
    auto out = gradient_norm_squared(m, s.u);
    const auto c = chi.values();
    for (std::size_t p = 0; p < out.size(); ++p) {
        out[p] = c[p] * c[p] * s.t * out[p] + alpha * s.u[p] * s.u[p] + T * w * s.v[p] * s.v[p];
    }
    return out;
}

AuxBudget calibrate_aux_budget() {
    // u = A + B cos x, v = A + C cos x with A = e^{-t}, B = (e^{-2t} + 1)/4,
    // C = (e^{-2t} - 1)/4 solves the linear system on the flat torus.
    constexpr double alpha = 0.75;  // Phi_0 T + 1/2 with Phi_0 = 1/4, T = 1
    constexpr double T = 1.0;
    auto coeffs = [](double t) {
        const double e = std::exp(-2.0 * t);
        return std::array<double, 3>{std::exp(-t), 0.25 * (e + 1.0), 0.25 * (e - 1.0)};
    };
    // (d/dt - Delta) G = u_x^2 - 2t u_x v_x - 2t u_xx^2 - 2 alpha u_x^2 - 2 T v_x^2 - 2 (alpha + T) u v.
    auto l_exact = [&](double x, double t) {
        const auto [a, b, c] = coeffs(t);
        const double u = a + b * std::cos(x), v = a + c * std::cos(x);
        const double ux = -b * std::sin(x), vx = -c * std::sin(x), uxx = -b * std::cos(x);
        return ux * ux - 2.0 * t * ux * vx - 2.0 * t * uxx * uxx - 2.0 * alpha * ux * ux - 2.0 * T * vx * vx -
               2.0 * (alpha + T) * u * v;
    };
    auto error = [&](int n, double dt) {
        ManifoldDescription d;
        d.kind = ManifoldKind::torus;
        d.resolution = {n, 8};
        const DiscreteManifold m = build_manifold(d);
        const std::vector<double> ones(m.node_count(), 1.0);
        // G is assembled exactly as for a trajectory: sampled u, v and the
        // discrete gradient.
        auto g_at = [&](double t) {
            const auto [a, b, c] = coeffs(t);
            std::vector<double> u(m.node_count()), v(m.node_count());
            for (int p = 0; p < m.node_count(); ++p) {
                const double x = m.geometry().coords[p].c0;
                u[p] = a + b * std::cos(x);
                v[p] = a + c * std::cos(x);
            }
            auto g = gradient_norm_squared(m, u);
            for (int p = 0; p < m.node_count(); ++p) g[p] = t * g[p] + alpha * u[p] * u[p] + T * v[p] * v[p];
            return g;
        };
        double worst = 0.0;
        for (double t : {0.25, 0.5, 0.75}) {
            const auto gp = g_at(t - dt), gm = g_at(t), gn = g_at(t + dt);
            const auto l = heat_operator(gp, gm, gn, 2.0 * dt, m, ones);
            for (int p = 0; p < m.node_count(); ++p) {
                worst = std::max(worst, std::abs(l[p] - l_exact(m.geometry().coords[p].c0, t)));
            }
        }
        return worst;
    };
    const double h_coarse = 2.0 * std::numbers::pi / 32.0;
    const double c1 = error(32, 1e-4) / (h_coarse * h_coarse);
    const double dt_coarse = 1.0 / 16.0;
    const double c2 = error(512, dt_coarse) / (dt_coarse * dt_coarse);
    return {4.0 * c1, 4.0 * c2};
}

AuxReport check_aux_function(const Trajectory& traj, const CutoffProfile& chi, const TheoremConstants& consts,
                             double slack, std::optional<AuxBudget> budget) {
    require_matching_configuration(consts.theorem, traj);
    if (traj.snapshots.size() < 3) throw InvalidInput("snapshot cadence too coarse for the auxiliary-function check");
    AuxReport r;
    r.slack = slack;
    r.budget = budget ? *budget : calibrate_aux_budget();
    r.spacing = grid_spacing(traj.initial.geometry());
    r.snapshot_dt = traj.snapshots[1].t - traj.snapshots[0].t;

    const double t_star = traj.hypothesis_time();
    const auto manifolds = traj.snapshot_manifolds();
    std::vector<std::vector<double>> g;
    for (std::size_t k = 0; k < traj.snapshots.size() && traj.snapshots[k].t < t_star; ++k) {
        g.push_back(aux_function(manifolds[k], chi, consts, traj.snapshots[k]));
    }
    const auto region = chi.region();
    const auto boundary = chi.region_boundary();
    const int n = traj.initial.node_count();

    r.boundary_max = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        for (int p = 0; p < n; ++p) {
            if (!region[p]) continue;
            if (k == 0 || boundary[p]) {
                r.boundary_max = std::max(r.boundary_max, g[k][p]);
            } else if (g[k][p] > r.interior_max) {
                r.interior_max = g[k][p];
                r.interior_max_time = traj.snapshots[k].t;
                r.interior_max_node = p;
            }
        }
    }
    r.max_principle_holds = r.interior_max <= r.boundary_max * (1.0 + slack);

    const double allowed = r.budget(r.spacing, r.snapshot_dt);
    r.worst_excess = -kInf;
    for (std::size_t k = 1; k + 1 < g.size(); ++k) {
        const double two_dt = traj.snapshots[k + 1].t - traj.snapshots[k - 1].t;
        const auto l = heat_operator(g[k - 1], g[k], g[k + 1], two_dt, manifolds[k], chi.values());
        for (int p = 0; p < n; ++p) {
            if (!region[p] || boundary[p]) continue;
            ++r.sampled_points;
            if (l[p] <= allowed) ++r.within_budget;
            r.worst_excess = std::max(r.worst_excess, l[p] - allowed);
        }
    }
    r.fraction_within = r.sampled_points > 0 ? double(r.within_budget) / r.sampled_points : 1.0;
    r.sign_holds = r.fraction_within >= r.required_fraction;
    return r;
}

}  // namespace bernstein
