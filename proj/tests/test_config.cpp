#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "caproj/cli.hpp"
#include "caproj/config.hpp"

using namespace caproj;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("caproj_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("case parsing") {
    CHECK(parse_case("I") == CaseId::I);
    CHECK(parse_case("ii") == CaseId::II);
    CHECK(parse_case("3") == CaseId::III);
    CHECK_THROWS_AS(parse_case("IV"), ConfigError);
}

TEST_CASE("case determines operator and limiter") {
    const ScenarioParams params = default_params();

    const Scenario one = build_scenario(params, CaseId::I);
    CHECK(one.kind == ProjectionKind::conventional);
    CHECK_FALSE(one.enable_rate_limit);

    const Scenario two = build_scenario(params, CaseId::II);
    CHECK(two.kind == ProjectionKind::conventional);
    CHECK(two.enable_rate_limit);

    const Scenario three = build_scenario(params, CaseId::III);
    CHECK(three.kind == ProjectionKind::modified);
    CHECK(three.enable_rate_limit);

    // the initial adaptive matrix starts inside the bound set
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 4; ++j) {
            const BoundSpec& spec = three.allocator.bounds.theta_at(i, j);
            CHECK(three.allocator.theta_init(i, j) >= spec.inner_lower());
            CHECK(three.allocator.theta_init(i, j) <= spec.inner_upper());
        }
    }
}

TEST_CASE("json overrides") {
    const ScenarioParams params = params_from_json_text(R"({
        "dt": 0.0005,
        "duration": 8.0,
        "fault": {"time": 4.0, "loss": 0.2},
        "controller": {"ky": [5.0, 4.0, 2.0]},
        "soft_sat": {"M": [1.0, 0.45, 0.15]},
        "allocator": {"gamma": 25.0}
    })");
    CHECK(params.dt == 0.0005);
    CHECK(params.duration == 8.0);
    CHECK(params.fault_time == 4.0);
    CHECK(params.fault_loss == 0.2);
    CHECK(params.ky(0) == 5.0);
    CHECK(params.sat_m(1) == 0.45);
    CHECK(params.gamma == 25.0);
    // untouched fields keep their defaults
    CHECK(params.ki(0) == default_params().ki(0));

    const Scenario scenario = build_scenario(params, CaseId::III);
    CHECK(scenario.dt == 0.0005);
    CHECK(scenario.schedule.segments.back().start == 4.0);
    CHECK(scenario.schedule.segments.back().lambda(0) == doctest::Approx(0.8));
}

TEST_CASE("json reference pulses") {
    const ScenarioParams params = params_from_json_text(R"({
        "reference": {
            "p": [{"amplitude": 0.1, "start": 1.0, "duration": 2.0}],
            "q": [],
            "r": [{"amplitude": -0.05, "start": 3.0, "duration": 1.0}]
        }
    })");
    CHECK(params.reference.channels[0].size() == 1);
    CHECK(params.reference.channels[1].empty());
    CHECK(params.reference.channels[2].size() == 1);
    CHECK(params.reference.channels[2][0].amplitude == -0.05);
}

TEST_CASE("json per-actuator fault") {
    const ScenarioParams params = params_from_json_text(R"({
        "fault": {"lambda": [1.0, 0.7, 0.7, 1.0]}
    })");
    const Scenario scenario = build_scenario(params, CaseId::III);
    const Vector lambda = scenario.schedule.segments.back().lambda;
    CHECK(lambda(0) == 1.0);
    CHECK(lambda(1) == 0.7);
    CHECK(lambda(3) == 1.0);
}

TEST_CASE("strict parsing rejects malformed configs") {
    CHECK_THROWS_AS(params_from_json_text("{"), ConfigError);
    CHECK_THROWS_AS((params_from_json_text(R"({"unknown": 1})")), ConfigError);
    CHECK_THROWS_AS((params_from_json_text(R"({"fault": {"when": 4.0}})")), ConfigError);
    CHECK_THROWS_AS((params_from_json_text(R"({"dt": "fast"})")), ConfigError);
    CHECK_THROWS_AS((params_from_json_text(R"({"controller": {"ky": [1.0, 2.0]}})")), ConfigError);
    CHECK_THROWS_AS((params_from_json_text(R"({"soft_sat": {"M": [1.0, "x", 2.0]}})")), ConfigError);
    CHECK_THROWS_AS(
        params_from_json_text(R"({"reference": {"p": [{"amplitude": 1, "begin": 0}]}})"),
        ConfigError);
}

TEST_CASE("run command writes trajectory and metrics") {
    const fs::path dir = temp_dir("run");
    RunOptions options;
    options.out_dir = dir.string();
    options.case_text = "III";
    options.duration = 1.0;

    CHECK(cmd_run(options) == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "metrics.txt"));

    const std::string csv = slurp(dir / "trajectory.csv");
    const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == 1002);  // header + duration/dt + 1 samples

    const std::string metrics_text = slurp(dir / "metrics.txt");
    CHECK(metrics_text.find("max_applied_rate:") != std::string::npos);
    CHECK(metrics_text.find("oscillation_index:") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("repeated runs write byte-identical files") {
    const fs::path dir_a = temp_dir("det_a");
    const fs::path dir_b = temp_dir("det_b");
    RunOptions options;
    options.case_text = "III";
    options.duration = 1.0;

    options.out_dir = dir_a.string();
    CHECK(cmd_run(options) == 0);
    options.out_dir = dir_b.string();
    CHECK(cmd_run(options) == 0);

    CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
    CHECK(slurp(dir_a / "metrics.txt") == slurp(dir_b / "metrics.txt"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("run command rejects a missing config") {
    RunOptions options;
    options.config_path = "/nonexistent/config.json";
    CHECK(cmd_run(options) == 2);
}

TEST_CASE("run command surface-checks dt overrides") {
    const fs::path dir = temp_dir("run_dt");
    RunOptions options;
    options.out_dir = dir.string();
    options.case_text = "I";
    options.dt = 0.0005;
    options.duration = 0.5;

    CHECK(cmd_run(options) == 0);
    const std::string csv = slurp(dir / "trajectory.csv");
    const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == 1002);
    fs::remove_all(dir);
}

TEST_CASE("verify command runs a single named check") {
    const fs::path dir = temp_dir("verify");
    VerifyOptions options;
    options.only = "lemma2";
    options.seed = 42;
    options.out_dir = dir.string();

    CHECK(cmd_verify(options) == 0);
    const std::string report = slurp(dir / "verify.txt");
    CHECK(report.find("lemma2:") != std::string::npos);
    CHECK(report.find("pass") != std::string::npos);

    VerifyOptions bogus;
    bogus.only = "bogus";
    CHECK(cmd_verify(bogus) == 2);
    fs::remove_all(dir);
}

TEST_CASE("sweep command writes one row per grid point") {
    const fs::path dir = temp_dir("sweep");
    SweepOptions options;
    options.out_dir = dir.string();
    options.case_text = "III";
    options.duration = 0.5;
    options.grid = {"gamma=20,40", "fault_loss=0,0.3"};

    CHECK(cmd_sweep(options) == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == 5);  // header + 2x2 grid
    CHECK(csv.find("gamma") != std::string::npos);
    CHECK(csv.find("fault_loss") != std::string::npos);
    fs::remove_all(dir);

    SweepOptions bad;
    bad.grid = {"gamma"};
    CHECK(cmd_sweep(bad) == 2);
}

TEST_CASE("fault magnitude sweep orders the tracking error") {
    const fs::path dir = temp_dir("sweep_fault");
    SweepOptions options;
    options.out_dir = dir.string();
    options.case_text = "III";
    options.grid = {"fault_loss=0,0.3"};

    CHECK(cmd_sweep(options) == 0);
    std::ifstream in(dir / "sweep.csv");
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);

    const auto post_fault_field = [](const std::string& row) {
        std::stringstream ss(row);
        std::string field;
        for (int k = 0; k < 5; ++k) std::getline(ss, field, ',');
        return std::stod(field);
    };
    // losing effectiveness must not improve post-fault tracking
    CHECK(post_fault_field(row0) < post_fault_field(row1));
    fs::remove_all(dir);
}

TEST_CASE("integration faults surface as exit code 3") {
    const fs::path dir = temp_dir("blowup");
    const fs::path cfg = dir / "unstable.json";
    {
        std::ofstream out(cfg);
        // a strongly unstable plant overflows the state within the horizon
        out << R"({"plant": {"A": [[50.0, 0, 0, 0, 0],
                                   [0, 50.0, 0, 0, 0],
                                   [0, 0, 50.0, 0, 0],
                                   [0, 0, 0, 50.0, 0],
                                   [0, 0, 0, 0, 50.0]]}})";
    }
    RunOptions options;
    options.config_path = cfg.string();
    options.out_dir = (dir / "out").string();
    options.case_text = "III";
    options.duration = 40.0;
    CHECK(cmd_run(options) == 3);
    fs::remove_all(dir);
}
