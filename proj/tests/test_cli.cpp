#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "strato/cli.hpp"
#include "strato/csv.hpp"
#include "strato/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs the CLI in-process with both streams captured, so failing-path
// diagnostics do not pollute the test log and can be asserted on.
int run(const std::vector<std::string>& args, std::string* err_text = nullptr) {
    std::vector<const char*> argv{"strato"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream err, out;
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    const int rc = strato::run_cli(static_cast<int>(argv.size()), argv.data());
    std::cerr.rdbuf(old_err);
    std::cout.rdbuf(old_out);
    if (err_text != nullptr) *err_text = err.str();
    return rc;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::path("cli_scratch") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json read_manifest(const fs::path& dir) {
    std::ifstream f(dir / "manifest.json");
    REQUIRE(f.good());
    return json::parse(f);
}

}  // namespace

TEST_CASE("modes command writes the basis products") {
    const fs::path dir = fresh_dir("modes");
    const fs::path cfg = dir / "run.json";
    write_text(cfg, R"({
        "profile": {"kind": "boussinesq-constant-n", "n": 3.14159265358979323846, "nz": 1025},
        "modes": 4
    })");

    const fs::path out_a = dir / "a";
    CHECK(run({"modes", "--config", cfg.string(), "--out", out_a.string()}) == 0);

    const strato::CsvTable speeds = strato::read_numeric_csv((out_a / "speeds.csv").string());
    REQUIRE(speeds.rows.size() == 4);
    CHECK(speeds.rows[0][0] == 1.0);
    CHECK(speeds.rows[0][1] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(speeds.rows[3][1] == doctest::Approx(0.25).epsilon(1e-4));

    const strato::CsvTable modes_csv = strato::read_numeric_csv((out_a / "modes.csv").string());
    CHECK(modes_csv.rows.size() == 1025);

    // three families, (rows x cols) residual entries each: f and dual are 4x4,
    // g runs 0..4 so 5x5
    std::ifstream gram(out_a / "orthonormality.csv");
    REQUIRE(gram.good());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(gram, line)) ++lines;
    CHECK(lines == 1 + 16 + 25 + 16);

    const json man = read_manifest(out_a);
    CHECK(man["command"] == "modes");
    CHECK(man["version"] == std::string(strato::kCliVersion));
    CHECK(man["config"]["profile"]["kind"] == "boussinesq-constant-n");
    CHECK(man["config"]["profile"]["rho0"] == 1.0);  // default made explicit
    CHECK(man["conventions"].contains("coupling_weights"));
    CHECK(man["derived"]["max_gram_residual"]["f"].get<double>() < 1e-8);

    // identical config, second directory: every byte identical
    const fs::path out_b = dir / "b";
    CHECK(run({"modes", "--config", cfg.string(), "--out", out_b.string()}) == 0);
    for (const char* name : {"speeds.csv", "modes.csv", "orthonormality.csv", "manifest.json"})
        CHECK(slurp(out_a / name) == slurp(out_b / name));
}

TEST_CASE("mixing command reports a diagonal alpha at constant stratification") {
    const fs::path dir = fresh_dir("mixing");
    const fs::path cfg = dir / "run.json";
    write_text(cfg, R"({
        "profile": {"kind": "boussinesq-constant-n", "n": 3.14159265358979323846, "nz": 2049},
        "modes": 6
    })");
    const fs::path out = dir / "out";
    CHECK(run({"mixing", "--config", cfg.string(), "--out", out.string()}) == 0);

    // matrix layout: row index then the six alpha columns
    const strato::CsvTable alpha = strato::read_numeric_csv((out / "alpha.csv").string());
    const double inv_n2 = 1.0 / (3.14159265358979323846 * 3.14159265358979323846);
    REQUIRE(alpha.rows.size() == 6);
    double offdiag = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        REQUIRE(alpha.rows[i].size() == 7);
        for (std::size_t j = 0; j < 6; ++j) {
            if (i == j)
                CHECK(alpha.rows[i][j + 1] == doctest::Approx(inv_n2).epsilon(1e-8));
            else
                offdiag = std::max(offdiag, std::abs(alpha.rows[i][j + 1]));
        }
    }
    CHECK(offdiag < 1e-8);

    const strato::CsvTable triples = strato::read_numeric_csv((out / "interactions.csv").string());
    const json man = read_manifest(out);
    CHECK(triples.rows.size() == man["derived"]["triples"].get<std::size_t>());
    CHECK(man["derived"]["dropped_pairs"].get<std::size_t>() > 0);
    CHECK(man["derived"]["alpha_max_offdiag"].get<double>() < 1e-8);
}

TEST_CASE("exit codes separate input, parameter, and usage failures") {
    const fs::path dir = fresh_dir("errors");
    std::string err;

    SUBCASE("missing config file") {
        CHECK(run({"modes", "--config", (dir / "absent.json").string()}, &err) == 2);
        CHECK(err.find("absent.json") != std::string::npos);
    }
    SUBCASE("malformed json") {
        write_text(dir / "bad.json", "{ this is not json");
        CHECK(run({"modes", "--config", (dir / "bad.json").string()}, &err) == 2);
    }
    SUBCASE("unknown top-level key") {
        write_text(dir / "extra.json", R"({
            "profile": {"kind": "boussinesq-constant-n", "n": 1.0, "nz": 65},
            "modes": 2, "mystery": 1
        })");
        CHECK(run({"modes", "--config", (dir / "extra.json").string()}, &err) == 2);
        CHECK(err.find("mystery") != std::string::npos);
    }
    SUBCASE("unknown profile key") {
        write_text(dir / "extra2.json", R"({
            "profile": {"kind": "boussinesq-constant-n", "n": 1.0, "nz": 65, "depht": 1.0},
            "modes": 2
        })");
        CHECK(run({"modes", "--config", (dir / "extra2.json").string()}, &err) == 2);
        CHECK(err.find("depht") != std::string::npos);
    }
    SUBCASE("missing tabulated profile file") {
        write_text(dir / "tab.json", R"({
            "profile": {"kind": "tabulated-csv", "path": "no_such_profile.csv", "nz": 65},
            "modes": 2
        })");
        CHECK(run({"modes", "--config", (dir / "tab.json").string()}, &err) == 2);
        CHECK(err.find("no_such_profile.csv") != std::string::npos);
    }
    SUBCASE("truncation beyond the resolution guard") {
        write_text(dir / "guard.json", R"({
            "profile": {"kind": "boussinesq-constant-n", "n": 1.0, "nz": 65},
            "modes": 40
        })");
        CHECK(run({"modes", "--config", (dir / "guard.json").string()}, &err) == 3);
        CHECK(err.find("ResolutionError") != std::string::npos);
    }
    SUBCASE("nonpositive dt") {
        write_text(dir / "dt.json", R"({
            "profile": {"kind": "boussinesq-constant-n", "n": 1.0, "nz": 65},
            "kind": "linear-uncoupled", "modes": 2, "nx": 16, "length": 1.0,
            "dt": -0.1, "t_end": 1.0,
            "initial": {"kind": "single-mode", "mode": 1}
        })");
        CHECK(run({"simulate", "--config", (dir / "dt.json").string()}, &err) == 3);
    }
    SUBCASE("unstable jump parameters") {
        write_text(dir / "jump.json", R"({"rho_plus": 1.0, "rho_minus": 2.0})");
        CHECK(run({"sharp-limit", "--config", (dir / "jump.json").string()}, &err) == 3);
        CHECK(err.find("UnstableJump") != std::string::npos);
    }
    SUBCASE("usage errors") {
        CHECK(run({}, &err) == 2);
        CHECK(run({"frobnicate", "--config", "x.json"}, &err) == 2);
        CHECK(run({"modes"}, &err) == 2);  // --config is required
        CHECK(run({"--help"}, &err) == 0);
    }
}

TEST_CASE("nonlinear at eps zero matches the uncoupled linear run") {
    const fs::path dir = fresh_dir("cross");
    const std::string common = R"(
        "profile": {"kind": "boussinesq-constant-n", "n": 3.14159265358979323846, "nz": 257},
        "modes": 4, "nx": 32, "length": 2.0,
        "dt": 0.005, "t_end": 0.5, "mu": 1.0,
        "initial": {"kind": "seeded-random", "seed": 11, "amplitude": 0.5, "kmax": 8},
        "snapshot_every": 20)";
    write_text(dir / "nl.json", "{" + common + R"(, "kind": "nonlinear", "eps": 0.0})");
    write_text(dir / "lin.json", "{" + common + R"(, "kind": "linear-uncoupled"})");

    const fs::path out_nl = dir / "nl";
    const fs::path out_lin = dir / "lin";
    REQUIRE(run({"simulate", "--config", (dir / "nl.json").string(), "--out", out_nl.string()}) == 0);
    REQUIRE(run({"simulate", "--config", (dir / "lin.json").string(), "--out", out_lin.string()}) == 0);

    const strato::CsvTable a = strato::read_numeric_csv((out_nl / "final_state.csv").string());
    const strato::CsvTable b = strato::read_numeric_csv((out_lin / "final_state.csv").string());
    REQUIRE(a.rows.size() == b.rows.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        for (std::size_t c = 2; c < 6; ++c)
            worst = std::max(worst, std::abs(a.rows[i][c] - b.rows[i][c]));
    CHECK(worst < 1e-8);

    // the linear run must have taken the closed-form basis for this to hold
    CHECK(read_manifest(out_lin)["derived"]["mode_source"].get<std::string>().find("closed-form") !=
          std::string::npos);

    const strato::CsvTable act = strato::read_numeric_csv((out_nl / "activation.csv").string());
    CHECK(act.rows.size() == 6);  // t = 0 plus every 20th of 100 steps
    CHECK(act.header.size() == 1 + 4 + 4);

    // seeded runs are reproducible byte for byte
    const fs::path out_nl2 = dir / "nl2";
    REQUIRE(run({"simulate", "--config", (dir / "nl.json").string(), "--out", out_nl2.string()}) == 0);
    for (const char* name : {"final_state.csv", "activation.csv", "manifest.json"})
        CHECK(slurp(out_nl / name) == slurp(out_nl2 / name));
}

TEST_CASE("linear-coupled run conserves its energy functional") {
    const fs::path dir = fresh_dir("coupled");
    write_text(dir / "run.json", R"({
        "profile": {"kind": "exponential", "rho0": 1.0, "rate": 0.3, "nz": 513,
                    "variant": "boussinesq"},
        "kind": "linear-coupled", "modes": 3, "nx": 32, "length": 2.0,
        "dt": 0.01, "t_end": 0.2,
        "initial": {"kind": "seeded-random", "seed": 5, "amplitude": 1.0},
        "snapshot_every": 5
    })");
    const fs::path out = dir / "out";
    REQUIRE(run({"simulate", "--config", (dir / "run.json").string(), "--out", out.string()}) == 0);

    const strato::CsvTable energy = strato::read_numeric_csv((out / "energy.csv").string());
    REQUIRE(energy.rows.size() >= 2);
    const double first = energy.rows.front()[1];
    const double last = energy.rows.back()[1];
    CHECK(first > 0.0);
    CHECK(std::abs(last - first) < 1e-10 * first);

    const json man = read_manifest(out);
    CHECK(man["derived"]["mode_source"].get<std::string>().find("eigensolve") !=
          std::string::npos);
    CHECK(man["derived"]["energy_drift"].get<double>() < 1e-10 * first);
}

TEST_CASE("sharp-limit default sweep writes the report and fitted orders") {
    const fs::path dir = fresh_dir("sharp");
    write_text(dir / "run.json", "{}");  // all defaults
    const fs::path out = dir / "out";
    REQUIRE(run({"sharp-limit", "--config", (dir / "run.json").string(), "--out", out.string()}) ==
            0);

    const strato::CsvTable report = strato::read_numeric_csv((out / "sharp_report.csv").string());
    REQUIRE(report.rows.size() == 4);
    CHECK(report.rows[0][0] == 0.04);
    CHECK(report.rows[3][0] == 0.005);

    const json man = read_manifest(out);
    CHECK(man["derived"]["cbar"].get<double>() ==
          doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-12));
    const double order = man["derived"]["c1_sq_order"].get<double>();
    CHECK(order > 0.8);
    CHECK(order < 1.2);
    CHECK(man["config"]["z0"].get<double>() == doctest::Approx(-1.0 / 3.0));

    const strato::CsvTable shapes = strato::read_numeric_csv((out / "shapes.csv").string());
    CHECK(shapes.header.size() == 2 + 4);
    CHECK(shapes.rows.front()[0] == -1.0);
    CHECK(shapes.rows.back()[0] == 0.0);
}

TEST_CASE("scratch cleanup") {
    std::error_code ec;
    fs::remove_all("cli_scratch", ec);
    CHECK(!ec);
}
