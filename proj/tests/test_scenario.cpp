#include "bernstein/error.hpp"
#include "bernstein/scenario.hpp"
#include "bernstein/suites.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bernstein;
using nlohmann::json;

namespace {

json minimal_t1() {
    return json::parse(R"({"name": "t1", "theorem": "T1", "system": {"u0": {"offset": 1.0}}})");
}

std::string message_of(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal scenario gets documented defaults") {
    const auto s = parse_scenario(minimal_t1());
    CHECK(s.manifold.kind == ManifoldKind::torus);
    CHECK(s.manifold.resolution[0] == 128);
    CHECK(s.manifold.resolution[1] == 128);
    CHECK(s.system.stepper == Stepper::rk4);
    CHECK(s.tolerances.slack == doctest::Approx(0.05));
    CHECK(s.flow == Flow::none);
    const json echoed = scenario_to_json(s);
    CHECK(echoed["manifold"]["resolution"] == json({128, 128}));
    CHECK(echoed["system"]["stepper"] == "explicit-rk4");
    CHECK(echoed["tolerances"]["slack"] == 0.05);
}

TEST_CASE("echoed scenario parses back to the same echo") {
    json doc = minimal_t1();
    doc["cutoff"] = {{"region", "ball"}, {"center", {1.0, 2.0}}, {"radius", 1.5}};
    const json once = scenario_to_json(parse_scenario(doc));
    json again = once;
    again["constants"].erase("K");
    again["constants"].erase("K1");
    again["constants"].erase("K2");
    again["system"].erase("b1");
    again["system"].erase("b2");
    CHECK(scenario_to_json(parse_scenario(again)) == once);
}

TEST_CASE("unknown keys are fatal") {
    json doc = minimal_t1();
    doc["slak"] = 0.1;
    CHECK(message_of(doc).find("slak") != std::string::npos);
    json nested = minimal_t1();
    nested["system"]["stepsize"] = 0.1;
    CHECK(message_of(nested).find("stepsize") != std::string::npos);
}

TEST_CASE("theorem, system and flow must agree") {
    json t3 = minimal_t1();
    t3["theorem"] = "T3";
    CHECK(message_of(t3).find("T3 requires local Ricci flow") != std::string::npos);
    json t2 = minimal_t1();
    t2["theorem"] = "T2";
    t2["system"]["kind"] = "exponential";
    t2["system"]["a"] = 1.0;
    t2["system"]["b1"] = 3.0;
    t2["system"]["b2"] = 3.0;
    CHECK(message_of(t2).find("a < 0 and b < 0") != std::string::npos);
    json t2lin = minimal_t1();
    t2lin["theorem"] = "T2";
    CHECK_FALSE(message_of(t2lin).empty());
}

TEST_CASE("field specs sample as documented") {
    ManifoldDescription d;
    d.resolution = {16, 16};
    const auto m = build_manifold(d);
    FieldSpec f;
    f.offset = 1.0;
    f.terms.push_back({FieldTerm::Kind::cos, 1, 2.0, 0.5});
    const auto v = sample_field(m, f);
    for (int p = 0; p < m.node_count(); ++p) {
        CHECK(v[p] == doctest::Approx(1.0 + 0.5 * std::cos(2.0 * m.geometry().coords[p].c1)));
    }
    CHECK(band_limited_field(m, 5, 9) == band_limited_field(m, 5, 9));
    CHECK(band_limited_field(m, 5, 9) != band_limited_field(m, 5, 10));
}

TEST_CASE("empty initial data: all observed values zero, verified") {
    json doc = json::parse(R"({"name": "empty", "theorem": "T1",
        "manifold": {"resolution": [16, 16]}, "system": {"T": 0.25}})");
    const auto r = run_scenario(parse_scenario(doc));
    CHECK(r.verified);
    for (const auto& d : r.report.series.observed_u) CHECK(d == 0.0);
    for (const auto& d : r.report.series.observed_v) CHECK(d == 0.0);
}

TEST_CASE("CSV header and determinism") {
    json doc = json::parse(R"({"name": "det", "theorem": "T1", "manifold": {"resolution": [16, 16]},
        "system": {"T": 0.25, "u0": {"offset": 1.0, "terms": [{"kind": "random", "amplitude": 0.2, "seed": 4}]},
                   "v0": {"offset": 1.0}}})");
    const auto a = run_scenario(parse_scenario(doc));
    const auto b = run_scenario(parse_scenario(doc));
    CHECK(a.csv == b.csv);
    CHECK(a.report_json.dump() == b.report_json.dump());
    CHECK(a.csv.substr(0, a.csv.find('\n')) ==
          "t,max_chi2t_grad_u2,bound_u,margin_u,max_chi2t_grad_v2,bound_v,margin_v,min_u,min_v,metric_min_eig");
    CHECK(a.report_json["schema"] == "bernstein-report/1");
    CHECK(a.report_json.contains("verdict"));
    CHECK(a.report_json.contains("constants"));
}

TEST_CASE("artifacts are written into the output directory") {
    const auto dir = std::filesystem::temp_directory_path() / "bernstein_test_artifacts";
    std::filesystem::remove_all(dir);
    write_artifacts(dir.string(), "x", json{{"a", 1}}, "t\n0\n");
    CHECK(read_file(dir / "x.csv") == "t\n0\n");
    CHECK(json::parse(read_file(dir / "x.report.json"))["a"] == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("environment overrides the output directory") {
    Scenario s;
    s.output_dir = "from-file";
    ::unsetenv("BERNSTEIN_OUTPUT_DIR");
    CHECK(output_directory(s) == "from-file");
    ::setenv("BERNSTEIN_OUTPUT_DIR", "/tmp/elsewhere", 1);
    CHECK(output_directory(s) == "/tmp/elsewhere");
    ::unsetenv("BERNSTEIN_OUTPUT_DIR");
}

TEST_CASE("suite trends serialize one CSV row per level") {
    SuiteResult r{"demo", {}};
    SuiteCheck c;
    c.name = "a, b";
    c.passed = true;
    c.trend = fit_convergence({8, 16, 32}, {0.4, 0.2, 0.1}, {4.0, 1.0, 0.25});
    r.checks.push_back(c);
    const std::string csv = r.trends_csv();
    CHECK(csv.rfind("quantity,level,spacing,value,fitted_order\n", 0) == 0);
    CHECK(csv.find("\na_b,16,0.20000000000000001,1,") != std::string::npos);
    CHECK(r.to_json()["checks"][0]["fitted_order"] == doctest::Approx(2.0));
}
