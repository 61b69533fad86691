#include "davies/errors.hpp"
#include "davies/harness.hpp"
#include "davies/io.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace davies;

namespace {

ExperimentConfig parse(const char* text) { return config_from_json(json::parse(text)); }

} // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse(R"({"bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"qubits": [9]})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"trials": 0})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"tol_scale": -1})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"format": "xml"})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"suites": ["nope"]})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"model": {"kind": "pauli-sum", "n": 2, "terms": [[1, "XQ"]]}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"generator": {"rate": {"kind": "table"}}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"random_model": {"background": "xx"}})"), ConfigError);
    const auto c = parse(R"({"random_model": {}, "qubits": [2, 3], "betas": [0.5], "seed": 4})");
    CHECK(c.qubits == std::vector<int>{2, 3});
    CHECK(c.seed == 4u);
}

TEST_CASE("random models need a seed") {
    const auto c = parse(R"({"random_model": {}})");
    CHECK_THROWS_AS(make_instance(c, 0), ConfigError);
}

TEST_CASE("instances cycle qubits then betas") {
    const auto c = parse(R"({"random_model": {}, "qubits": [1, 2], "betas": [0.1, 0.2], "seed": 1})");
    CHECK(make_instance(c, 0).n == 1);
    CHECK(make_instance(c, 1).n == 2);
    CHECK(make_instance(c, 1).beta == 0.1);
    CHECK(make_instance(c, 2).beta == 0.2);
    CHECK(make_instance(c, 3).seed == derive_seed(1, 3));
    const auto a = make_instance(c, 3);
    const auto b = make_instance(c, 3);
    CHECK(model_to_json(a.model) == model_to_json(b.model));
}

TEST_CASE("model json round trip") {
    const json j = json::parse(R"({"kind": "field-perturbed", "n": 2, "terms": [[1.0, "ZZ"]],
                                   "field": {"P": "X", "h": [0.3, -0.2]}})");
    const auto m = model_from_json(j);
    const auto back = model_from_json(model_to_json(m));
    CHECK((build_model(m).matrix() - build_model(back).matrix()).cwiseAbs().maxCoeff() == 0.0);
    Rng rng(2);
    const Operator x = random_complex(4, rng);
    CHECK((matrix_from_json(matrix_to_json(x)) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jump tokens") {
    const auto j = resolve_jumps(std::vector<JumpSpec>{{"X1", std::nullopt}, {"ZZ", std::nullopt}}, 2);
    REQUIRE(j.size() == 2);
    CHECK((j[0] - PauliString("XI").matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((j[1] - PauliString("ZZ").matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(resolve_jumps(std::nullopt, 2).size() == 6);
    CHECK_THROWS(resolve_jumps(std::vector<JumpSpec>{{"X3", std::nullopt}}, 2));
}

TEST_CASE("gap json uses +inf for empty spaces") {
    GapValue g;
    g.infinite = true;
    CHECK(gap_to_json(g)["value"] == "+inf");
    g = GapValue{0.5, false, false};
    CHECK(gap_to_json(g)["value"] == 0.5);
}

TEST_CASE("runs are deterministic and thread-count independent") {
    auto c = parse(R"({"random_model": {}, "qubits": [2, 3], "trials": 6, "seed": 77})");
    c.threads = 1;
    const auto a = run_comparison(c);
    c.threads = 3;
    const auto b = run_comparison(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].instance.seed == b[i].instance.seed);
        CHECK(a[i].gap.value == b[i].gap.value);
        CHECK(a[i].lambda_cl == b[i].lambda_cl);
    }
}

TEST_CASE("parallel_for rethrows") {
    CHECK_THROWS_AS(parallel_for(10, 2, [](int i) {
                        if (i == 4) throw NumericalError("x");
                    }),
                    NumericalError);
    std::vector<int> seen(20, 0);
    parallel_for(20, 4, [&](int i) { seen[static_cast<std::size_t>(i)] = i; });
    for (int i = 0; i < 20; ++i) CHECK(seen[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("verify suites pass on a small corpus") {
    auto c = parse(R"({"random_model": {}, "qubits": [1, 2], "trials": 4, "seed": 3})");
    const auto rep = run_verify(c);
    CHECK(rep.suites.size() == verify_suite_names().size());
    for (const auto& s : rep.suites) {
        INFO(s.name);
        CHECK(s.passed());
        CHECK(s.checks > 0);
    }
}

TEST_CASE("ap scan reports structured cases") {
    auto c = parse(R"({"ap_cases": ["z-field", "edge-xx"], "qubits": [3], "trials": 10, "seed": 1})");
    const auto cases = run_ap_scan(c);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].with_either == 0);
    CHECK(cases[1].with_either == 10);
}

TEST_CASE("csv outputs have one line per row plus header") {
    auto c = parse(R"({"random_model": {}, "qubits": [2], "trials": 3, "seed": 5})");
    const auto rows = run_gap(c);
    const auto csv = gap_rows_to_csv(rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
