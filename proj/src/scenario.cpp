#include "bernstein/scenario.hpp"

#include "bernstein/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

namespace bernstein {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw InvalidInput("'" + where + "' must be an object");
    const std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!names.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidInput("bad value for '" + std::string(key) + "' in " + where);
    }
}

Vec2 get_vec2(const json& obj, const char* key, Vec2 fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto v = get<std::vector<double>>(obj, key, {}, where);
    if (v.size() != 2) throw InvalidInput("'" + std::string(key) + "' in " + where + " needs two numbers");
    return {v[0], v[1]};
}

FieldSpec parse_field(const json& obj, const std::string& where) {
    FieldSpec f;
    if (obj.is_number()) {
        f.offset = obj.get<double>();
        return f;
    }
    check_keys(obj, {"offset", "terms"}, where);
    f.offset = get(obj, "offset", 0.0, where);
    if (obj.contains("terms")) {
        if (!obj["terms"].is_array()) throw InvalidInput("'terms' in " + where + " must be a list");
        for (const auto& t : obj["terms"]) {
            const std::string tw = where + ".terms";
            check_keys(t, {"kind", "axis", "wavenumber", "amplitude", "modes", "seed"}, tw);
            FieldTerm term;
            const auto kind = get<std::string>(t, "kind", "cos", tw);
            if (kind == "cos") term.kind = FieldTerm::Kind::cos;
            else if (kind == "sin") term.kind = FieldTerm::Kind::sin;
            else if (kind == "height") term.kind = FieldTerm::Kind::height;
            else if (kind == "random") term.kind = FieldTerm::Kind::random;
            else throw InvalidInput("unknown field term '" + kind + "' in " + tw);
            term.axis = get(t, "axis", term.kind == FieldTerm::Kind::height ? 2 : 0, tw);
            term.wavenumber = get(t, "wavenumber", 1.0, tw);
            term.amplitude = get(t, "amplitude", 0.0, tw);
            term.modes = get(t, "modes", 5, tw);
            term.seed = get<std::uint64_t>(t, "seed", 1, tw);
            f.terms.push_back(term);
        }
    }
    return f;
}

json field_to_json(const FieldSpec& f) {
    json terms = json::array();
    for (const auto& t : f.terms) {
        const char* kinds[] = {"cos", "sin", "height", "random"};
        terms.push_back({{"kind", kinds[int(t.kind)]}, {"axis", t.axis}, {"wavenumber", t.wavenumber},
                         {"amplitude", t.amplitude}, {"modes", t.modes}, {"seed", t.seed}});
    }
    return {{"offset", f.offset}, {"terms", terms}};
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string to_string(SuiteTag tag) {
    switch (tag) {
        case SuiteTag::identities: return "identities";
        case SuiteTag::inequalities: return "inequalities";
        case SuiteTag::convergence: return "convergence";
    }
    return "?";
}

SuiteTag parse_suite(std::string_view text) {
    if (text == "identities") return SuiteTag::identities;
    if (text == "inequalities") return SuiteTag::inequalities;
    if (text == "convergence") return SuiteTag::convergence;
    throw InvalidInput("unknown suite '" + std::string(text) + "'");
}

std::vector<double> band_limited_field(const DiscreteManifold& m, int modes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> wave(-3, 3);
    const Geometry& g = m.geometry();
    const int n = g.node_count;
    std::vector<double> out(n, 0.0);
    if (g.kind == ManifoldKind::sphere) {
        // Ambient polynomials of degree <= 2 restricted to the sphere.
        std::array<double, 9> c{};
        for (int i = 0; i < std::min(modes, 9); ++i) c[i] = normal(rng);
        for (int p = 0; p < n; ++p) {
            const Vec2 q = g.coords[p];
            const double x = std::sin(q.c0) * std::cos(q.c1), y = std::sin(q.c0) * std::sin(q.c1), z = std::cos(q.c0);
            out[p] = c[0] * x + c[1] * y + c[2] * z + 0.5 * (c[3] * x * y + c[4] * y * z + c[5] * z * x +
                                                             c[6] * x * x + c[7] * y * y + c[8] * z * z);
        }
        return out;
    }
    const double base = 2.0 * std::numbers::pi / g.side;
    for (int i = 0; i < modes; ++i) {
        int kx = wave(rng), ky = g.is_graph() ? 0 : wave(rng);
        if (kx == 0 && ky == 0) kx = 1;
        const double amp = normal(rng) / (1.0 + kx * kx + ky * ky);
        const double ph = phase(rng);
        for (int p = 0; p < n; ++p) {
            const Vec2 q = g.coords[p];
            out[p] += amp * std::cos(base * (kx * q.c0 + ky * q.c1) + ph);
        }
    }
    return out;
}

std::vector<double> sample_field(const DiscreteManifold& m, const FieldSpec& spec) {
    const Geometry& g = m.geometry();
    std::vector<double> out(g.node_count, spec.offset);
    for (const auto& t : spec.terms) {
        if (t.kind == FieldTerm::Kind::random) {
            const auto r = band_limited_field(m, t.modes, t.seed);
            for (int p = 0; p < g.node_count; ++p) out[p] += t.amplitude * r[p];
            continue;
        }
        if (t.kind == FieldTerm::Kind::height && g.kind != ManifoldKind::sphere) {
            throw InvalidInput("height terms are only defined on the sphere");
        }
        if (t.axis < 0 || t.axis > (t.kind == FieldTerm::Kind::height ? 2 : 1)) {
            throw InvalidInput("field term axis out of range");
        }
        for (int p = 0; p < g.node_count; ++p) {
            const Vec2 q = g.coords[p];
            const double x = t.axis == 0 ? q.c0 : q.c1;
            switch (t.kind) {
                case FieldTerm::Kind::cos: out[p] += t.amplitude * std::cos(t.wavenumber * x); break;
                case FieldTerm::Kind::sin: out[p] += t.amplitude * std::sin(t.wavenumber * x); break;
                case FieldTerm::Kind::height: {
                    const double st = std::sin(q.c0);
                    const double X[3] = {st * std::cos(q.c1), st * std::sin(q.c1), std::cos(q.c0)};
                    out[p] += t.amplitude * X[t.axis];
                    break;
                }
                case FieldTerm::Kind::random: break;
            }
        }
    }
    return out;
}

Scenario parse_scenario(const json& doc) {
    check_keys(doc, {"name", "theorem", "suite", "manifold", "weight", "cutoff", "system", "flow", "constants",
                     "tolerances", "output_dir", "seed", "fuzz_count"},
               "scenario");
    Scenario s;
    s.name = get<std::string>(doc, "name", s.name, "scenario");
    if (doc.contains("theorem")) s.theorem = parse_theorem(get<std::string>(doc, "theorem", "", "scenario"));
    if (doc.contains("suite")) s.suite = parse_suite(get<std::string>(doc, "suite", "", "scenario"));
    if (s.theorem && s.suite) throw InvalidInput("a scenario names either a theorem or a suite, not both");
    s.output_dir = get<std::string>(doc, "output_dir", s.output_dir, "scenario");
    s.seed = get<std::uint64_t>(doc, "seed", s.seed, "scenario");
    s.fuzz_count = get(doc, "fuzz_count", s.fuzz_count, "scenario");

    s.manifold.resolution = {128, 128};
    if (doc.contains("manifold")) {
        const auto& m = doc["manifold"];
        check_keys(m, {"kind", "resolution", "side", "radius", "m", "graph"}, "manifold");
        s.manifold.kind = parse_manifold_kind(get<std::string>(m, "kind", "torus-grid", "manifold"));
        if (m.contains("resolution")) {
            const auto r = get<std::vector<int>>(m, "resolution", {}, "manifold");
            if (r.size() == 1) s.manifold.resolution = {r[0], r[0]};
            else if (r.size() == 2) s.manifold.resolution = {r[0], r[1]};
            else throw InvalidInput("manifold.resolution needs one or two integers");
        }
        s.manifold.side = get(m, "side", s.manifold.side, "manifold");
        s.manifold.radius = get(m, "radius", s.manifold.radius, "manifold");
        s.manifold.synthetic_dimension = get(m, "m", s.manifold.synthetic_dimension, "manifold");
        if (m.contains("graph")) {
            const auto& g = m["graph"];
            check_keys(g, {"nodes", "dimension", "side", "edges", "coordinates"}, "manifold.graph");
            auto& gd = s.manifold.graph;
            gd.nodes = get(g, "nodes", gd.nodes, "manifold.graph");
            gd.dimension = get(g, "dimension", gd.dimension, "manifold.graph");
            gd.side = get(g, "side", gd.side, "manifold.graph");
            gd.coordinates = get(g, "coordinates", gd.coordinates, "manifold.graph");
            if (g.contains("edges")) {
                for (const auto& e : g["edges"]) {
                    const auto triple = e.get<std::vector<double>>();
                    if (triple.size() != 3) throw InvalidInput("graph edges are [from, to, weight] triples");
                    gd.edges.push_back({int(triple[0]), int(triple[1]), triple[2]});
                }
            }
        }
    }
    if (doc.contains("weight")) {
        const auto& w = doc["weight"];
        check_keys(w, {"kind", "amplitude", "axis", "wavenumber", "center", "width"}, "weight");
        auto& ws = s.manifold.weight;
        ws.kind = parse_weight_kind(get<std::string>(w, "kind", "zero", "weight"));
        ws.amplitude = get(w, "amplitude", ws.amplitude, "weight");
        ws.axis = get(w, "axis", ws.axis, "weight");
        ws.wavenumber = get(w, "wavenumber", ws.wavenumber, "weight");
        ws.center = get_vec2(w, "center", ws.center, "weight");
        ws.width = get(w, "width", ws.width, "weight");
    }
    if (doc.contains("cutoff")) {
        const auto& c = doc["cutoff"];
        check_keys(c, {"region", "center", "radius", "inner_radius", "degree"}, "cutoff");
        s.cutoff.region = parse_cutoff_region(get<std::string>(c, "region", "whole", "cutoff"));
        s.cutoff.center = get_vec2(c, "center", s.cutoff.center, "cutoff");
        s.cutoff.radius = get(c, "radius", s.cutoff.radius, "cutoff");
        s.cutoff.inner_radius = get(c, "inner_radius", s.cutoff.inner_radius, "cutoff");
        s.cutoff.degree = get(c, "degree", s.cutoff.degree, "cutoff");
    }
    if (doc.contains("system")) {
        const auto& y = doc["system"];
        check_keys(y, {"kind", "a", "b", "b1", "b2", "T", "stepper", "cfl", "dt", "snapshots",
                       "stop_at_positivity_loss", "u0", "v0"},
                   "system");
        auto& sys = s.system;
        sys.kind = parse_system_kind(get<std::string>(y, "kind", "linear", "system"));
        sys.a = get(y, "a", sys.a, "system");
        sys.b = get(y, "b", sys.b, "system");
        if (y.contains("b1")) sys.b1 = get(y, "b1", 0.0, "system");
        if (y.contains("b2")) sys.b2 = get(y, "b2", 0.0, "system");
        sys.T = get(y, "T", sys.T, "system");
        sys.stepper = parse_stepper(get<std::string>(y, "stepper", "explicit-rk4", "system"));
        sys.cfl = get(y, "cfl", sys.cfl, "system");
        sys.dt = get(y, "dt", sys.dt, "system");
        sys.snapshots = get(y, "snapshots", sys.snapshots, "system");
        sys.stop_at_positivity_loss = get(y, "stop_at_positivity_loss", sys.stop_at_positivity_loss, "system");
        if (y.contains("u0")) s.u0 = parse_field(y["u0"], "system.u0");
        if (y.contains("v0")) s.v0 = parse_field(y["v0"], "system.v0");
    }
    s.flow = parse_flow(get<std::string>(doc, "flow", "none", "scenario"));
    if (doc.contains("constants")) {
        const auto& c = doc["constants"];
        check_keys(c, {"K", "K1", "K2", "gamma_K"}, "constants");
        if (c.contains("K")) s.K = get(c, "K", 0.0, "constants");
        if (c.contains("K1")) s.K1 = get(c, "K1", 0.0, "constants");
        if (c.contains("K2")) s.K2 = get(c, "K2", 0.0, "constants");
        s.gamma_K = get(c, "gamma_K", s.gamma_K, "constants");
    }
    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        check_keys(t, {"slack", "aux_slack"}, "tolerances");
        s.tolerances.slack = get(t, "slack", s.tolerances.slack, "tolerances");
        s.tolerances.aux_slack = get(t, "aux_slack", s.tolerances.aux_slack, "tolerances");
    }

    if (s.theorem) {
        const TheoremId th = *s.theorem;
        const std::string name = to_string(th);
        if (is_evolving(th) && s.flow != Flow::local_ricci) throw InvalidInput(name + " requires local Ricci flow");
        if (!is_evolving(th) && s.flow != Flow::none) throw InvalidInput(name + " requires a static metric (flow = none)");
        if (is_exponential(th)) {
            if (s.system.kind != SystemKind::exponential) throw InvalidInput(name + " requires the exponential system");
            if (!(s.system.a < 0.0 && s.system.b < 0.0)) {
                throw InvalidInput(name + " requires a < 0 and b < 0: the exponential system is only resolved "
                                          "for negative coefficients (a >= 0 or b >= 0 is left open)");
            }
            if (!(s.system.b1 > 1.0 && s.system.b2 > 1.0 && std::isfinite(s.system.b1) && std::isfinite(s.system.b2))) {
                throw InvalidInput(name + " requires caps b1 > 1 and b2 > 1");
            }
        } else if (s.system.kind != SystemKind::linear) {
            throw InvalidInput(name + " requires the linear system");
        }
    }
    if (!(s.tolerances.slack >= 0.0) || !(s.tolerances.aux_slack >= 0.0)) {
        throw InvalidInput("tolerances must be non-negative");
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open scenario file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    if (s.theorem) doc["theorem"] = to_string(*s.theorem);
    if (s.suite) doc["suite"] = to_string(*s.suite);
    const auto& m = s.manifold;
    json graph = {{"nodes", m.graph.nodes}, {"dimension", m.graph.dimension}, {"side", m.graph.side},
                  {"coordinates", m.graph.coordinates}};
    json edges = json::array();
    for (const auto& e : m.graph.edges) edges.push_back({e.from, e.to, e.weight});
    graph["edges"] = edges;
    doc["manifold"] = {{"kind", to_string(m.kind)},
                       {"resolution", {m.resolution[0], m.resolution[1]}},
                       {"side", m.side},
                       {"radius", m.radius},
                       {"m", m.synthetic_dimension},
                       {"graph", graph}};
    const auto& w = m.weight;
    doc["weight"] = {{"kind", to_string(w.kind)}, {"amplitude", w.amplitude}, {"axis", w.axis},
                     {"wavenumber", w.wavenumber}, {"center", {w.center.c0, w.center.c1}}, {"width", w.width}};
    const auto& c = s.cutoff;
    doc["cutoff"] = {{"region", to_string(c.region)}, {"center", {c.center.c0, c.center.c1}}, {"radius", c.radius},
                     {"inner_radius", c.inner_radius}, {"degree", c.degree}};
    const auto& y = s.system;
    doc["system"] = {{"kind", to_string(y.kind)},
                     {"a", y.a},
                     {"b", y.b},
                     {"b1", finite_or_null(y.b1)},
                     {"b2", finite_or_null(y.b2)},
                     {"T", y.T},
                     {"stepper", to_string(y.stepper)},
                     {"cfl", y.cfl},
                     {"dt", y.dt},
                     {"snapshots", y.snapshots},
                     {"stop_at_positivity_loss", y.stop_at_positivity_loss},
                     {"u0", field_to_json(s.u0)},
                     {"v0", field_to_json(s.v0)}};
    doc["flow"] = to_string(s.flow);
    json consts = {{"gamma_K", s.gamma_K}};
    consts["K"] = s.K ? json(*s.K) : json("certified");
    consts["K1"] = s.K1 ? json(*s.K1) : json("certified");
    consts["K2"] = s.K2 ? json(*s.K2) : json("certified");
    doc["constants"] = consts;
    doc["tolerances"] = {{"slack", s.tolerances.slack}, {"aux_slack", s.tolerances.aux_slack}};
    doc["output_dir"] = s.output_dir;
    doc["seed"] = s.seed;
    doc["fuzz_count"] = s.fuzz_count;
    return doc;
}

ScenarioSetup setup_scenario(const Scenario& s) {
    DiscreteManifold m = build_manifold(s.manifold);
    CutoffProfile chi = build_cutoff(m, s.cutoff);
    auto u0 = sample_field(m, s.u0);
    auto v0 = sample_field(m, s.v0);
    return {std::move(m), std::move(chi), std::move(u0), std::move(v0)};
}

TheoremConstants scenario_constants(const Scenario& s, std::span<const DiscreteManifold> snapshots,
                                    const CutoffProfile& chi, std::span<const double> u0, std::span<const double> v0) {
    if (!s.theorem) throw InvalidInput("scenario names no theorem");
    const auto region = chi.region();
    const double u0_max = max_over_region(u0, region);
    const double v0_max = max_over_region(v0, region);
    double k_cert = 0.0;
    WeightBounds wb = snapshots.front().weight_bounds();
    for (const auto& m : snapshots) {
        k_cert = std::max(k_cert, m.curvature().lower_bound);
        const WeightBounds seen = measure_weight_bounds(m);
        wb.gradient = std::max(wb.gradient, seen.gradient);
        wb.hessian = std::max(wb.hessian, seen.hessian);
    }
    const double K = s.K.value_or(k_cert);
    const double K1 = s.K1.value_or(wb.gradient);
    const double K2 = s.K2.value_or(wb.hessian);
    const auto& y = s.system;
    TheoremConstants c;
    switch (*s.theorem) {
        case TheoremId::T1: c = phi_constants(snapshots, chi, K, y.T, u0_max, v0_max); break;
        case TheoremId::T2: c = psi_constants(snapshots, chi, K, y.a, y.b, y.b1, y.b2, y.T, u0_max, v0_max); break;
        case TheoremId::T3: c = lambda_constants(snapshots, chi, K1, K2, y.T, u0_max, v0_max); break;
        case TheoremId::T4:
            c = gamma_constants(snapshots, chi, K1, K2, y.a, y.b, y.b1, y.b2, y.T, u0_max, v0_max, s.gamma_K);
            break;
    }
    add_initial_data_gates(c, u0, v0);
    return c;
}

std::string diagnostics_csv(const TheoremReport& r, const Trajectory& traj) {
    std::string out = kCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < traj.diagnostics.size(); ++i) {
        const auto& d = traj.diagnostics[i];
        const double fields[] = {d.t,
                                 d.max_chi2t_grad_u2,
                                 r.bound_u,
                                 r.series.margin_u[i],
                                 d.max_chi2t_grad_v2,
                                 r.bound_v,
                                 r.series.margin_v[i],
                                 d.min_u,
                                 d.min_v,
                                 d.metric_min_eig};
        for (std::size_t k = 0; k < std::size(fields); ++k) {
            if (k) out += ',';
            out += g17(fields[k]);
        }
        out += '\n';
    }
    return out;
}

json constants_json(const TheoremConstants& c) {
    json gates = json::array();
    for (const auto& g : c.gates) {
        gates.push_back({{"name", g.name}, {"passed", g.passed}, {"blocking", g.blocking}, {"detail", g.detail},
                         {"witness_node", g.witness_node}, {"witness_time", finite_or_null(g.witness_time)}});
    }
    const auto& in = c.inputs;
    json out = {{"theorem", to_string(c.theorem)},
                {"field", c.field_name()},
                {"max_u", c.max_u},
                {"max_v", c.max_v},
                {c.bound_name(1), c.bound_u},
                {c.bound_name(2), c.bound_v},
                {"inputs",
                 {{"m", in.m}, {"n", in.n}, {"K", in.K}, {"K1", in.K1}, {"K2", in.K2}, {"a", in.a}, {"b", in.b},
                  {"b1", in.b1}, {"b2", in.b2}, {"T", in.T}, {"u0_max", in.u0_max}, {"v0_max", in.v0_max}}},
                {"gates", gates},
                {"notes", c.notes}};
    if (is_evolving(c.theorem)) {
        out["hypothesis_mapping"] = {{"K1", "|grad f| <= K1"}, {"K2", "Hess f >= -K2 g"}};
        out["curvature_independent"] = true;
        out["depends_on"] = {"chi", "|grad f| bound K1", "Hess f bound K2", "m", "n", "xi", "T"};
    }
    return out;
}

json report_to_json(const Scenario& s, const TheoremReport& r, const AuxReport& aux, const Trajectory& traj) {
    json gates = json::array();
    for (const auto& g : r.gates) {
        gates.push_back({{"name", g.name}, {"passed", g.passed}, {"blocking", g.blocking}, {"detail", g.detail},
                         {"witness_node", g.witness_node}, {"witness_time", finite_or_null(g.witness_time)}});
    }
    json doc = {{"schema", kReportSchema},
                {"scenario", scenario_to_json(s)},
                {"theorem", to_string(r.theorem)},
                {"verdict", to_string(r.verdict)},
                {"slack", r.slack},
                {"slack_policy", "observed max of chi^2 t |grad u|^2 may exceed the bound by the relative slack; "
                                 "the continuum statement has none"},
                {"constants", constants_json(r.constants)},
                {"gates", gates},
                {"window",
                 {{"end", r.window_end},
                  {"restricted", r.window_restricted},
                  {"positivity_loss_time", finite_or_null(traj.positivity_loss_time)},
                  {"cap_violation_time", finite_or_null(traj.cap_violation_time)}}},
                {"margins",
                 {{"worst_u", finite_or_null(r.worst_margin_u)},
                  {"worst_v", finite_or_null(r.worst_margin_v)},
                  {"worst", finite_or_null(r.worst_margin)},
                  {"worst_time", r.worst_margin_time}}},
                {"aux",
                 {{"boundary_max", aux.boundary_max},
                  {"interior_max", aux.interior_max},
                  {"interior_max_time", aux.interior_max_time},
                  {"max_principle_holds", aux.max_principle_holds},
                  {"slack", aux.slack},
                  {"budget_c1", aux.budget.c1},
                  {"budget_c2", aux.budget.c2},
                  {"spacing", aux.spacing},
                  {"snapshot_dt", aux.snapshot_dt},
                  {"sampled_points", aux.sampled_points},
                  {"fraction_within_budget", aux.fraction_within},
                  {"sign_holds", aux.sign_holds}}},
                {"trajectory",
                 {{"steps", traj.diagnostics.size() - 1},
                  {"snapshots", traj.snapshots.size()},
                  {"truncated", traj.truncated}}},
                {"notes", r.notes}};
    if (r.margin_trend) {
        doc["margin_trend"] = {{"levels", r.margin_trend->levels},
                               {"values", r.margin_trend->values},
                               {"monotone", r.margin_trend->monotone}};
    }
    return doc;
}

RunResult run_scenario(const Scenario& s) {
    if (!s.theorem) throw InvalidInput("'run' needs a scenario with a theorem; use 'suite' for suites");
    ScenarioSetup setup = setup_scenario(s);
    SystemSpec spec = s.system;
    spec.u0 = setup.u0;
    spec.v0 = setup.v0;
    const Trajectory traj = solve_trajectory(setup.manifold, setup.chi, spec, s.flow);
    std::vector<DiscreteManifold> snapshots;
    if (s.flow == Flow::local_ricci) snapshots = traj.snapshot_manifolds();
    else snapshots.push_back(setup.manifold);
    const TheoremConstants consts = scenario_constants(s, snapshots, setup.chi, setup.u0, setup.v0);

    RunResult out{check_bernstein(traj, consts, s.tolerances.slack),
                  check_aux_function(traj, setup.chi, consts, s.tolerances.aux_slack)};
    out.report_json = report_to_json(s, out.report, out.aux, traj);
    out.report_json["csv"] = s.name + ".csv";
    out.csv = diagnostics_csv(out.report, traj);
    out.verified = out.report.verdict == Verdict::verified;
    return out;
}

void write_artifacts(const std::string& dir, const std::string& name, const json& report, const std::string& csv) {
    std::filesystem::create_directories(dir);
    const auto base = std::filesystem::path(dir) / name;
    {
        std::ofstream out(base.string() + ".report.json");
        out << report.dump(2) << '\n';
    }
    if (!csv.empty()) {
        std::ofstream out(base.string() + ".csv", std::ios::binary);
        out << csv;
    }
}

std::string output_directory(const Scenario& s) {
    if (const char* env = std::getenv("BERNSTEIN_OUTPUT_DIR"); env && *env) return env;
    return s.output_dir;
}

}  // namespace bernstein
