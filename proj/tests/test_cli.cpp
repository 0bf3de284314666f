#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "ermakov/runner.hpp"
#include "ermakov/scenario.hpp"

using namespace ermakov;
namespace fs = std::filesystem;

#ifndef ERMAKOV_SOURCE_DIR
#define ERMAKOV_SOURCE_DIR "."
#endif

namespace {

const fs::path kScenarios = fs::path(ERMAKOV_SOURCE_DIR) / "scenarios";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("ermakov_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_scenario(const TempDir& dir, const std::string& name,
                        const std::string& body) {
    fs::path p = dir.path / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("scenario loading: defaults and generator sets") {
    auto sc = scenario::load(kScenarios / "toy_reduction.json");
    CHECK(sc.spec.cls() == systems::SystemClass::toy);
    CHECK(sc.rtol == 1e-12);
    CHECK(sc.theta_samples == 200);
    CHECK(sc.report.check_generators.size() == 13);  // nine printed + four corrected
    CHECK(sc.report.flow_generators.size() == 9);    // corrected real forms
    CHECK(sc.report.conditions.size() == 1);
    CHECK(sc.report.ansatz.substr(0, 4) == "exp(");
}

TEST_CASE("scenario loading: strict validation") {
    TempDir dir("validation");
    // unknown top-level key
    auto p1 = write_scenario(dir, "bad1.json", R"({
      "system": {"class": "toy", "w": "0"},
      "ic": {"x": 1, "y": 1, "vx": 0, "vy": 0},
      "t_span": [0, 1], "surprise": 1})");
    CHECK_THROWS_AS(scenario::load(p1), ScenarioError);
    // extraneous class field: toy carries no f
    auto p2 = write_scenario(dir, "bad2.json", R"({
      "system": {"class": "toy", "w": "0", "f": "1"},
      "ic": {"x": 1, "y": 1, "vx": 0, "vy": 0},
      "t_span": [0, 1]})");
    CHECK_THROWS_AS(scenario::load(p2), ScenarioError);
    // generalized must not carry h or C
    auto p3 = write_scenario(dir, "bad3.json", R"({
      "system": {"class": "generalized", "f": "1", "g": "1", "h": "1", "w": "0"},
      "ic": {"x": 1, "y": 1, "vx": 0, "vy": 0},
      "t_span": [0, 1]})");
    CHECK_THROWS_AS(scenario::load(p3), ScenarioError);
    // malformed shape expression with position info
    auto p4 = write_scenario(dir, "bad4.json", R"({
      "system": {"class": "toy", "w": "1 + *"},
      "ic": {"x": 1, "y": 1, "vx": 0, "vy": 0},
      "t_span": [0, 1]})");
    CHECK_THROWS_AS(scenario::load(p4), ScenarioError);
    // reversed span
    auto p5 = write_scenario(dir, "bad5.json", R"({
      "system": {"class": "toy", "w": "0"},
      "ic": {"x": 1, "y": 1, "vx": 0, "vy": 0},
      "t_span": [2, 1]})");
    CHECK_THROWS_AS(scenario::load(p5), ScenarioError);
    // missing scenario file
    CHECK(cli::run_command("simulate", dir.path / "absent.json", dir.path / "o") == 1);
}

TEST_CASE("simulate: exit 0 and closed-form x column") {
    TempDir dir("simulate");
    int rc = cli::run_command("simulate", kScenarios / "toy_closed_form.json",
                              dir.path / "out");
    CHECK(rc == 0);
    std::string csv = slurp(dir.path / "out" / "trajectory.csv");
    REQUIRE(!csv.empty());
    std::istringstream lines(csv);
    std::string line, header;
    std::getline(lines, header);
    CHECK(header == "t,x,y,vx,vy,L,I");
    // the whole x column must match the closed form sqrt(1 + t^2)
    size_t rows = 0;
    double t = 0, x = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        row >> t >> x;
        CHECK(std::abs(x - std::sqrt(1.0 + t * t)) < 1e-9);
        ++rows;
    }
    CHECK(rows > 50);
    CHECK(t == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(fs::exists(dir.path / "out" / "invariant.json"));
}

TEST_CASE("exit codes: numerical failure and precondition violations") {
    TempDir dir("codes");
    // toy diagonal ic: L = 0, reduce hits the turning point -> exit 2
    auto diag = write_scenario(dir, "diag.json", R"({
      "system": {"class": "toy", "w": "0"},
      "ic": {"x": 1, "y": 1, "vx": 0, "vy": 0},
      "t_span": [0, 2], "rtol": 1e-10, "atol": 1e-12})");
    CHECK(cli::run_command("reduce", diag, dir.path / "o1") == 2);

    // nonzero frequency: reduction precondition -> exit 3
    auto wspin = write_scenario(dir, "wspin.json", R"({
      "system": {"class": "toy", "w": "1"},
      "ic": {"x": 1, "y": 2, "vx": 0.3, "vy": -0.1},
      "t_span": [0, 2]})");
    CHECK(cli::run_command("reduce", wspin, dir.path / "o2") == 3);

    // kepler with C != 0 -> exit 3
    CHECK(cli::run_command("reduce", kScenarios / "kepler_radial.json",
                           dir.path / "o3") == 3);

    // singular start for simulate -> config error (invalid ic) is exit 1
    auto sing = write_scenario(dir, "sing.json", R"({
      "system": {"class": "toy", "w": "0"},
      "ic": {"x": 1e-9, "y": 1, "vx": 0, "vy": 0},
      "t_span": [0, 1]})");
    CHECK(cli::run_command("simulate", sing, dir.path / "o4") == 1);

    // unknown command -> exit 1
    CHECK(cli::run_command("banana", diag, dir.path / "o5") == 1);

    // symmetry-solve without an ansatz -> exit 1
    CHECK(cli::run_command("symmetry-solve", diag, dir.path / "o6") == 1);
}

TEST_CASE("symmetry-solve: emits the exact corrected coefficient") {
    TempDir dir("solve");
    int rc = cli::run_command("symmetry-solve", kScenarios / "generalized_reduction.json",
                              dir.path / "out");
    CHECK(rc == 0);
    std::string doc = slurp(dir.path / "out" / "symmetry_solve.json");
    CHECK(doc.find("\"value\": \"sqrt2*i\"") != std::string::npos);
    CHECK(doc.find("\"consistent\": true") != std::string::npos);
}

TEST_CASE("symmetry-check: verdicts for printed and corrected forms") {
    TempDir dir("check");
    int rc = cli::run_command("symmetry-check", kScenarios / "toy_reduction.json",
                              dir.path / "out");
    CHECK(rc == 0);
    std::string doc = slurp(dir.path / "out" / "symmetry_check.json");
    // printed Gamma6p fails, corrected passes
    auto pos_printed = doc.find("\"name\": \"Gamma6p\"");
    auto pos_corrected = doc.find("\"name\": \"Gamma6p_corrected\"");
    REQUIRE(pos_printed != std::string::npos);
    REQUIRE(pos_corrected != std::string::npos);
    CHECK(doc.find("\"is_symmetry\": false", pos_printed) < pos_corrected);
    CHECK(doc.find("\"is_symmetry\": true", pos_corrected) != std::string::npos);
}

TEST_CASE("flow-verify: the default corrected set passes at the shipped tolerance") {
    TempDir dir("flow");
    int rc = cli::run_command("flow-verify", kScenarios / "toy_reduction.json",
                              dir.path / "out");
    CHECK(rc == 0);
    auto doc = nlohmann::json::parse(slurp(dir.path / "out" / "flow_verify.json"));
    CHECK(doc["epsilon"] == 0.1);
    REQUIRE(doc["mappings"].size() == 9);
    for (const auto& m : doc["mappings"]) {
        INFO(m["generator"].get<std::string>());
        CHECK(m["pass"] == true);
        CHECK(m["max_defect"].get<double>() < 1e-6);
    }
}

TEST_CASE("audit: defect CSV with pinned header") {
    TempDir dir("audit");
    int rc = cli::run_command("audit", kScenarios / "toy_reduction.json",
                              dir.path / "out");
    CHECK(rc == 0);
    std::string csv = slurp(dir.path / "out" / "audit_toy_L.csv");
    CHECK(csv.substr(0, 13) == "theta,defect\n");
    std::string doc = slurp(dir.path / "out" / "audit_report.json");
    CHECK(doc.find("\"dynamically_consistent\": false") != std::string::npos);
}

TEST_CASE("reduce and pullback outputs exist with pinned schemas") {
    TempDir dir("reduce");
    int rc = cli::run_command("reduce", kScenarios / "generalized_reduction.json",
                              dir.path / "out");
    CHECK(rc == 0);
    std::string reduced = slurp(dir.path / "out" / "reduced.csv");
    CHECK(reduced.rfind("theta,t,r,u,u_theta,u_thetatheta,L,L2\n", 0) == 0);
    std::string residuals = slurp(dir.path / "out" / "reduced_residuals.csv");
    CHECK(residuals.find("e_derived_full") != std::string::npos);
    CHECK(residuals.find("e_paper_2_13") != std::string::npos);

    rc = cli::run_command("pullback", kScenarios / "generalized_reduction.json",
                          dir.path / "out2");
    CHECK(rc == 0);
    std::string pb = slurp(dir.path / "out2" / "pullback_Gamma2-re_V2.csv");
    CHECK(pb.rfind(
              "theta,t,r,dt_derived,dr_derived,dt_paper,dr_paper,mismatch_dt,"
              "mismatch_dr\n",
              0) == 0);
}

TEST_CASE("byte-identical reruns of the same command") {
    TempDir dir("determinism");
    for (const char* cmd : {"reduce", "symmetry-check", "audit"}) {
        REQUIRE(cli::run_command(cmd, kScenarios / "toy_reduction.json",
                                 dir.path / "a" / cmd) == 0);
        REQUIRE(cli::run_command(cmd, kScenarios / "toy_reduction.json",
                                 dir.path / "b" / cmd) == 0);
        for (const auto& entry :
             fs::recursive_directory_iterator(dir.path / "a" / cmd)) {
            if (!entry.is_regular_file()) continue;
            fs::path rel = fs::relative(entry.path(), dir.path / "a" / cmd);
            INFO(cmd << "/" << rel.string());
            CHECK(slurp(entry.path()) == slurp(dir.path / "b" / cmd / rel));
        }
    }
}

TEST_CASE("failures print one machine-parsable JSON line on stderr") {
    TempDir dir("diag");
    std::ostringstream captured;
    auto* old = std::cerr.rdbuf(captured.rdbuf());
    int rc = cli::run_command("reduce", kScenarios / "kepler_radial.json",
                              dir.path / "out");
    std::cerr.rdbuf(old);
    CHECK(rc == 3);
    std::string line = captured.str();
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);
    auto doc = nlohmann::json::parse(line);
    CHECK(doc["error"] == "precondition");
    CHECK(doc["message"].get<std::string>().find("C = 0") != std::string::npos);
}

TEST_CASE("simulate flags a singularity approach with exit 2") {
    TempDir dir("singular");
    // attractive coupling drives the orbit into the y axis
    auto p = write_scenario(dir, "attract.json", R"({
      "system": {"class": "generalized", "f": "-1", "g": "-1", "w": "0"},
      "ic": {"x": 1, "y": 1, "vx": -1, "vy": 0},
      "t_span": [0, 5], "rtol": 1e-10, "atol": 1e-12})");
    std::ostringstream captured;
    auto* old = std::cerr.rdbuf(captured.rdbuf());
    int rc = cli::run_command("simulate", p, dir.path / "out");
    std::cerr.rdbuf(old);
    CHECK(rc == 2);
    auto doc = nlohmann::json::parse(captured.str());
    CHECK(doc["error"] == "numerical");
}

TEST_CASE("float formatting is 17 significant digits with '.' separator") {
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(-4.0 / 3.0) == "-1.3333333333333333");
    double pi4 = 0.78539816339744831;
    CHECK(io::format_double(pi4) == "0.78539816339744828");
}
