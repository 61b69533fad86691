// Runs the davies binary end to end.
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path tmpdir() {
    static const fs::path d = [] {
        auto p = fs::temp_directory_path() / ("davies_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return d;
}

fs::path write(const std::string& name, const std::string& body) {
    const auto p = tmpdir() / name;
    std::ofstream(p) << body;
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(DAVIES_CLI) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

nlohmann::json load(const fs::path& p) {
    std::ifstream f(p);
    return nlohmann::json::parse(f);
}

void strip_times(nlohmann::json& j) {
    if (j.is_object()) {
        j.erase("wall_time");
        for (auto& [k, v] : j.items()) strip_times(v);
    } else if (j.is_array()) {
        for (auto& v : j) strip_times(v);
    }
}

const char* kRandom = R"({"random_model": {}, "qubits": [2], "trials": 3})";

} // namespace

TEST_CASE("exit codes") {
    const auto cfg = write("random.json", kRandom);
    const auto out = (tmpdir() / "o.json").string();
    CHECK(run("gap " + cfg.string() + " --seed 3 --out " + out) == 0);
    CHECK(run("compare " + cfg.string() + " --seed 3 --out " + out) == 0);
    CHECK(run("cheeger " + cfg.string() + " --seed 3 --out " + out) == 0);
    CHECK(run("verify " + cfg.string() + " --seed 3 --out " + out) == 0);
    CHECK(run("ap-scan " + cfg.string() + " --seed 3 --out " + out) == 0);
    // no seed for a random model
    CHECK(run("gap " + cfg.string()) == 2);
    CHECK(run("gap " + write("bad.json", R"({"qubits": [12]})").string()) == 2);
    CHECK(run("gap " + write("unknown.json", R"({"colour": 1})").string()) == 2);
    CHECK(run("frobnicate x") == 2);
    CHECK(run("gap " + cfg.string() + " --seed 3 --format yaml") == 2);
}

TEST_CASE("same seed gives identical output apart from timings") {
    const auto cfg = write("det.json", kRandom);
    const auto a = tmpdir() / "a.json";
    const auto b = tmpdir() / "b.json";
    REQUIRE(run("compare " + cfg.string() + " --seed 9 --threads 1 --out " + a.string()) == 0);
    REQUIRE(run("compare " + cfg.string() + " --seed 9 --threads 2 --out " + b.string()) == 0);
    auto ja = load(a), jb = load(b);
    strip_times(ja);
    strip_times(jb);
    CHECK(ja == jb);
    const auto c = tmpdir() / "c.json";
    REQUIRE(run("compare " + cfg.string() + " --seed 10 --out " + c.string()) == 0);
    auto jc = load(c);
    strip_times(jc);
    CHECK(ja != jc);
}

TEST_CASE("csv output") {
    const auto cfg = write("csv.json", kRandom);
    const auto out = tmpdir() / "o.csv";
    REQUIRE(run("gap " + cfg.string() + " --seed 1 --format csv --out " + out.string()) == 0);
    std::ifstream f(out);
    std::string header;
    std::getline(f, header);
    CHECK(header.rfind("trial,seed,n,beta", 0) == 0);
}

TEST_CASE("a rate table that breaks detailed balance fails verification") {
    // H = Z: Bohr frequencies -2, 0, 2 with G(2) = G(-2)
    const auto cfg = write("broken.json", R"({
        "model": {"kind": "pauli-sum", "n": 1, "terms": [[1.0, "Z"]]},
        "generator": {"beta": 1.0, "rate": {"kind": "table", "table": [[-2, 0.5], [0, 0.5], [2, 0.5]]},
                      "jumps": ["X1"]},
        "suites": ["kms", "divergence", "identity"],
        "samples": 3
    })");
    CHECK(run("verify " + cfg.string()) == 1);
    const auto good = write("good.json", R"({
        "model": {"kind": "pauli-sum", "n": 1, "terms": [[1.0, "Z"]]},
        "generator": {"beta": 1.0, "rate": {"kind": "glauber"}, "jumps": ["X1"]},
        "suites": ["kms", "divergence", "identity"],
        "samples": 3
    })");
    CHECK(run("verify " + good.string()) == 0);
}
