#include "bernstein/constants.hpp"

#include "bernstein/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bernstein {
namespace {

struct ChiData {
    std::vector<double> grad2;
    std::vector<double> lap;    // Delta chi
    std::vector<double> lap_f;  // Delta_f chi
};

ChiData chi_data(const DiscreteManifold& m, const CutoffProfile& chi) {
    return {chi.gradient_norm_squared(m), chi.laplacian(m), chi.weighted_laplacian(m)};
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

void require_snapshots(std::span<const DiscreteManifold> snapshots) {
    if (snapshots.empty()) throw InvalidInput("constants need at least one manifold snapshot");
}

// Evaluates `term(snapshot, node, chi data)` on every snapshot; returns the
// first snapshot's field and the max over Omega and all snapshots.
template <class Term>
std::pair<std::vector<double>, double> evaluate(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi,
                                                Term term) {
    std::vector<double> first;
    double best = -std::numeric_limits<double>::infinity();
    const auto region = chi.region();
    for (const auto& m : snapshots) {
        const ChiData d = chi_data(m, chi);
        std::vector<double> field(m.node_count());
        for (int p = 0; p < m.node_count(); ++p) field[p] = term(m, p, d);
        best = std::max(best, max_over_region(field, region));
        if (first.empty()) first = std::move(field);
    }
    return {std::move(first), best};
}

double max_curvature_bound(std::span<const DiscreteManifold> snapshots) {
    double out = 0.0;
    for (const auto& m : snapshots) out = std::max(out, m.curvature().lower_bound);
    return out;
}

ConstantInputs base_inputs(const DiscreteManifold& m, double T, double u0_max, double v0_max) {
    ConstantInputs in;
    in.m = m.synthetic_dimension();
    in.n = m.dimension();
    in.T = T;
    in.u0_max = u0_max;
    in.v0_max = v0_max;
    return in;
}

void common_gates(TheoremConstants& c) {
    const double T = c.inputs.T;
    c.gates.push_back({"horizon", T > 0.0, "T = " + fmt(T)});
    c.gates.push_back({"dimension", c.inputs.m > c.inputs.n,
                       "m = " + fmt(c.inputs.m) + ", n = " + std::to_string(c.inputs.n)});
    const bool exp = is_exponential(c.theorem);
    const double threshold = exp ? -1.0 / (2.0 * T) : -(1.0 + 1.0 / (2.0 * T));
    const std::string name = c.field_name() + "_0";
    c.gates.push_back({name + " threshold", c.max_u > threshold && (!exp || c.max_v > threshold),
                       name + " = " + fmt(c.max_u) + (exp ? " / " + fmt(c.max_v) : "") + " > " + fmt(threshold)});
    if (exp) {
        const auto& in = c.inputs;
        c.gates.push_back({"a < 0, b < 0", in.a < 0.0 && in.b < 0.0,
                           "a = " + fmt(in.a) + ", b = " + fmt(in.b) +
                               "; the exponential system is only resolved for negative coefficients"});
        c.gates.push_back({"b1 > 1, b2 > 1", in.b1 > 1.0 && in.b2 > 1.0, "b1 = " + fmt(in.b1) + ", b2 = " + fmt(in.b2)});
    }
}

void weight_gates(TheoremConstants& c, std::span<const DiscreteManifold> snapshots) {
    WeightBounds seen;
    for (const auto& m : snapshots) {
        const WeightBounds b = measure_weight_bounds(m);
        seen.gradient = std::max(seen.gradient, b.gradient);
        seen.hessian = std::max(seen.hessian, b.hessian);
    }
    c.gates.push_back({"|grad f| <= K1", seen.gradient <= c.inputs.K1 + 1e-10,
                       "sup |grad f| = " + fmt(seen.gradient) + ", K1 = " + fmt(c.inputs.K1)});
    c.gates.push_back({"Hess f >= -K2 g", seen.hessian <= c.inputs.K2 + 1e-10,
                       "sup (-lambda_min Hess f) = " + fmt(seen.hessian) + ", K2 = " + fmt(c.inputs.K2)});
    c.notes.push_back("hypothesis naming follows the proof: K1 bounds |grad f|, K2 bounds -Hess f "
                      "(the statement of the exponential evolving theorem swaps the two names)");
}

void curvature_gate(TheoremConstants& c, std::span<const DiscreteManifold> snapshots) {
    const double need = max_curvature_bound(snapshots);
    c.gates.push_back({"Ric_f^{m-n} >= -K g", c.inputs.K + 1e-12 >= need,
                       "certified K = " + fmt(need) + ", supplied K = " + fmt(c.inputs.K)});
}

}  // namespace

std::string to_string(TheoremId id) {
    switch (id) {
        case TheoremId::T1: return "T1";
        case TheoremId::T2: return "T2";
        case TheoremId::T3: return "T3";
        case TheoremId::T4: return "T4";
    }
    return "?";
}

TheoremId parse_theorem(std::string_view text) {
    if (text == "T1") return TheoremId::T1;
    if (text == "T2") return TheoremId::T2;
    if (text == "T3") return TheoremId::T3;
    if (text == "T4") return TheoremId::T4;
    throw InvalidInput("unknown theorem '" + std::string(text) + "' (expected T1..T4)");
}

bool TheoremConstants::gates_pass() const {
    return std::all_of(gates.begin(), gates.end(), [](const GateCheck& g) { return g.passed; });
}

std::string TheoremConstants::field_name() const {
    switch (theorem) {
        case TheoremId::T1: return "Phi";
        case TheoremId::T2: return "Psi";
        case TheoremId::T3: return "Lambda";
        case TheoremId::T4: return "Gamma";
    }
    return "?";
}

std::string TheoremConstants::bound_name(int which) const {
    const char* letters = "BCDE";
    return std::string(1, letters[int(theorem)]) + std::to_string(which);
}

double max_over_region(std::span<const double> field, std::span<const char> region) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < field.size(); ++p) {
        if (region[p]) best = std::max(best, field[p]);
    }
    return best;
}

TheoremConstants phi_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K,
                               double T, double u0_max, double v0_max) {
    require_snapshots(snapshots);
    TheoremConstants c;
    c.theorem = TheoremId::T1;
    c.inputs = base_inputs(snapshots.front(), T, u0_max, v0_max);
    c.inputs.K = K;
    const double m = c.inputs.m;
    const auto values = chi.values();
    auto [field, best] = evaluate(snapshots, chi, [&](const DiscreteManifold&, int p, const ChiData& d) {
        return 8.0 * m * d.grad2[p] - values[p] * d.lap_f[p] + 7.0 * d.grad2[p] + 0.25 + K;
    });
    c.field_u = field;
    c.field_v = std::move(field);
    c.max_u = c.max_v = best;
    c.bound_u = bound_constant(best, T, u0_max, v0_max);
    c.bound_v = bound_constant(best, T, v0_max, u0_max);
    common_gates(c);
    curvature_gate(c, snapshots);
    return c;
}

TheoremConstants psi_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K,
                               double a, double b, double b1, double b2, double T, double u0_max, double v0_max) {
    require_snapshots(snapshots);
    TheoremConstants c;
    c.theorem = TheoremId::T2;
    c.inputs = base_inputs(snapshots.front(), T, u0_max, v0_max);
    c.inputs.K = K;
    c.inputs.a = a;
    c.inputs.b = b;
    c.inputs.b1 = b1;
    c.inputs.b2 = b2;
    const double m = c.inputs.m;
    const auto values = chi.values();
    auto psi = [&](double xi) {
        return evaluate(snapshots, chi, [&](const DiscreteManifold&, int p, const ChiData& d) {
            return 8.0 * m * d.grad2[p] - values[p] * d.lap_f[p] + 7.0 * d.grad2[p] + 0.25 * xi * xi + K;
        });
    };
    std::tie(c.field_u, c.max_u) = psi(a);
    std::tie(c.field_v, c.max_v) = psi(b);
    c.bound_u = bound_constant(c.max_u, T, u0_max, v0_max, b2 * b2);
    c.bound_v = bound_constant(c.max_v, T, v0_max, u0_max, b1 * b1);
    c.notes.push_back("v estimate uses Psi_0(K,b), the symmetric counterpart of the u estimate");
    common_gates(c);
    curvature_gate(c, snapshots);
    return c;
}

TheoremConstants lambda_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K1,
                                  double K2, double T, double u0_max, double v0_max) {
    require_snapshots(snapshots);
    TheoremConstants c;
    c.theorem = TheoremId::T3;
    c.inputs = base_inputs(snapshots.front(), T, u0_max, v0_max);
    c.inputs.K1 = K1;
    c.inputs.K2 = K2;
    const double m = c.inputs.m;
    const double mn = m - c.inputs.n;
    const auto values = chi.values();
    auto [field, best] = evaluate(snapshots, chi, [&](const DiscreteManifold&, int p, const ChiData& d) {
        const double x = values[p];
        return K2 * x * x + 8.0 * m * d.grad2[p] + x * x * K1 / mn + 8.0 * x * x - (x * d.lap[p] + d.grad2[p]) +
               0.25 + x * std::sqrt(d.grad2[p]) * K1;
    });
    c.field_u = field;
    c.field_v = std::move(field);
    c.max_u = c.max_v = best;
    c.bound_u = bound_constant(best, T, u0_max, v0_max);
    c.bound_v = bound_constant(best, T, v0_max, u0_max);
    c.notes.push_back("Lambda implemented as written, including the 8 chi^2 term and K1 (not K1^2) over m - n");
    common_gates(c);
    weight_gates(c, snapshots);
    return c;
}

TheoremConstants gamma_constants(std::span<const DiscreteManifold> snapshots, const CutoffProfile& chi, double K1,
                                 double K2, double a, double b, double b1, double b2, double T, double u0_max,
                                 double v0_max, double K) {
    require_snapshots(snapshots);
    TheoremConstants c;
    c.theorem = TheoremId::T4;
    c.inputs = base_inputs(snapshots.front(), T, u0_max, v0_max);
    c.inputs.K = K;
    c.inputs.K1 = K1;
    c.inputs.K2 = K2;
    c.inputs.a = a;
    c.inputs.b = b;
    c.inputs.b1 = b1;
    c.inputs.b2 = b2;
    const double m = c.inputs.m;
    const double mn = m - c.inputs.n;
    const auto values = chi.values();
    auto gamma = [&](double xi) {
        return evaluate(snapshots, chi, [&](const DiscreteManifold&, int p, const ChiData& d) {
            const double x = values[p];
            return K2 * x * x + 8.0 * m * d.grad2[p] + x * x * K1 * K1 / mn - x * d.lap[p] + 7.0 * d.grad2[p] +
                   x * std::sqrt(d.grad2[p]) * K1 + 0.25 * xi * xi + K;
        });
    };
    std::tie(c.field_u, c.max_u) = gamma(a);
    std::tie(c.field_v, c.max_v) = gamma(b);
    c.bound_u = bound_constant(c.max_u, T, u0_max, v0_max, b2 * b2);
    c.bound_v = bound_constant(c.max_v, T, v0_max, u0_max, b1 * b1);
    c.notes.push_back("trailing K of Gamma is an unspecified constant; using K = " + fmt(K));
    c.notes.push_back("E2 uses Gamma_0(b) and T b1^2 max u0, the symmetric counterpart of E1");
    common_gates(c);
    weight_gates(c, snapshots);
    return c;
}

void add_initial_data_gates(TheoremConstants& c, std::span<const double> u0, std::span<const double> v0) {
    auto lowest = [](std::span<const double> f) {
        return int(std::min_element(f.begin(), f.end()) - f.begin());
    };
    const int iu = lowest(u0);
    const int iv = lowest(v0);
    c.gates.push_back({"u0 >= 0", u0[iu] >= 0.0, "min u0 = " + fmt(u0[iu]), iu, 0.0});
    c.gates.push_back({"v0 >= 0", v0[iv] >= 0.0, "min v0 = " + fmt(v0[iv]), iv, 0.0});
    if (is_exponential(c.theorem)) {
        auto highest = [](std::span<const double> f) {
            return int(std::max_element(f.begin(), f.end()) - f.begin());
        };
        const int ju = highest(u0);
        const int jv = highest(v0);
        c.gates.push_back({"u0 <= ln b1", u0[ju] <= std::log(c.inputs.b1),
                           "max u0 = " + fmt(u0[ju]) + ", ln b1 = " + fmt(std::log(c.inputs.b1)), ju, 0.0});
        c.gates.push_back({"v0 <= ln b2", v0[jv] <= std::log(c.inputs.b2),
                           "max v0 = " + fmt(v0[jv]) + ", ln b2 = " + fmt(std::log(c.inputs.b2)), jv, 0.0});
    }
}

}  // namespace bernstein
