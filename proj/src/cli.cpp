#include "caproj/cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "caproj/config.hpp"
#include "caproj/verify.hpp"

namespace caproj {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitIntegrationFault = 3;

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << contents;
}

Scenario scenario_from_options(const std::string& config_path, const std::string& case_text,
                               std::optional<double> dt, std::optional<double> duration) {
    ScenarioParams params = load_params(config_path);
    if (dt) params.dt = *dt;
    if (duration) params.duration = *duration;
    return build_scenario(params, parse_case(case_text));
}

double worst_tracking_fraction(const Metrics& m) {
    double worst = 0.0;
    for (const auto& seg : m.tracking) {
        if (seg.amplitude != 0.0) {
            worst = std::max(worst, seg.rms / std::abs(seg.amplitude));
        }
    }
    return worst;
}

double post_fault_tracking_fraction(const Metrics& m) {
    double worst = 0.0;
    for (const auto& seg : m.tracking) {
        if (seg.amplitude != 0.0 && seg.start >= m.fault_time) {
            worst = std::max(worst, seg.rms / std::abs(seg.amplitude));
        }
    }
    return worst;
}

struct GridAxis {
    std::string key;
    std::vector<double> values;
};

GridAxis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size()) {
        throw ConfigError("grid entry must look like param=v1,v2,... got '" + text + "'");
    }
    GridAxis axis;
    axis.key = text.substr(0, eq);
    std::stringstream values(text.substr(eq + 1));
    std::string item;
    while (std::getline(values, item, ',')) {
        try {
            axis.values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in grid entry '" + text + "'");
        }
    }
    if (axis.values.empty()) throw ConfigError("grid entry '" + text + "' lists no values");
    return axis;
}

void apply_axis(ScenarioParams& params, const std::string& key, double value) {
    if (key == "gamma") {
        params.gamma = value;
    } else if (key == "fault_loss") {
        params.fault_loss = value;
        params.fault_lambda.reset();
    } else if (key == "fault_time") {
        params.fault_time = value;
    } else if (key == "q_diag") {
        params.q_diag = value;
    } else if (key == "a_m_diag") {
        params.a_m_diag = value;
    } else if (key == "safety") {
        params.safety = value;
    } else if (key == "theta_margin") {
        params.theta_margin = value;
    } else if (key == "lambda_design") {
        params.lambda_design = value;
    } else if (key == "dt") {
        params.dt = value;
    } else if (key == "duration") {
        params.duration = value;
    } else {
        throw ConfigError("unknown sweep parameter '" + key + "'");
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int cmd_run(const RunOptions& options) {
    Scenario scenario;
    try {
        scenario = scenario_from_options(options.config_path, options.case_text, options.dt,
                                         options.duration);
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitBadConfig;
    }

    try {
        const Trajectory trajectory = run_scenario(scenario);
        const Metrics m = metrics(trajectory, scenario.reference);

        const fs::path out_dir(options.out_dir);
        fs::create_directories(out_dir);
        {
            std::ofstream csv(out_dir / "trajectory.csv", std::ios::binary);
            if (!csv) throw ConfigError("cannot write trajectory.csv in " + out_dir.string());
            write_trajectory_csv(trajectory, csv);
        }
        write_file(out_dir / "metrics.txt", format_metrics(m));
        std::cout << "wrote " << (out_dir / "trajectory.csv").string() << " ("
                  << trajectory.samples.size() << " samples) and metrics.txt\n";
        return kExitOk;
    } catch (const IntegrationFault& ex) {
        std::cerr << "integration fault: " << ex.what() << "\n";
        return kExitIntegrationFault;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitBadConfig;
    }
}

int cmd_verify(const VerifyOptions& options) {
    ProjectionBounds bounds;
    try {
        ScenarioParams params = load_params(options.config_path);
        bounds = build_scenario(params, CaseId::III).allocator.bounds;
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitBadConfig;
    }

    std::vector<CheckReport> reports;
    try {
        if (options.only.empty()) {
            reports = run_all_checks(bounds, options.seed);
        } else {
            reports.push_back(run_named_check(bounds, options.only, options.seed));
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitBadConfig;
    }

    const std::string text = format_reports(reports);
    std::cout << text;
    if (!options.out_dir.empty()) {
        const fs::path out_dir(options.out_dir);
        fs::create_directories(out_dir);
        write_file(out_dir / "verify.txt", text);
    }
    for (const auto& r : reports) {
        if (!r.pass) return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_sweep(const SweepOptions& options) {
    std::vector<GridAxis> axes;
    ScenarioParams base;
    CaseId case_id;
    try {
        base = load_params(options.config_path);
        if (options.dt) base.dt = *options.dt;
        if (options.duration) base.duration = *options.duration;
        case_id = parse_case(options.case_text);
        for (const auto& text : options.grid) axes.push_back(parse_axis(text));
        if (axes.empty()) axes.push_back({"gamma", {base.gamma}});
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitBadConfig;
    }

    std::size_t total = 1;
    for (const auto& axis : axes) total *= axis.values.size();

    struct Row {
        std::vector<double> point;
        std::string status = "ok";
        Metrics m;
        bool failed = false;
    };

    const auto run_point = [&](std::size_t flat) -> Row {
        Row row;
        std::size_t rem = flat;
        ScenarioParams params = base;
        for (const auto& axis : axes) {
            const double value = axis.values[rem % axis.values.size()];
            rem /= axis.values.size();
            row.point.push_back(value);
            apply_axis(params, axis.key, value);
        }
        try {
            const Scenario scenario = build_scenario(params, case_id);
            const Trajectory trajectory = run_scenario(scenario);
            row.m = metrics(trajectory, scenario.reference);
        } catch (const std::exception& ex) {
            row.status = ex.what();
            row.failed = true;
        }
        return row;
    };

    // bounded worker pool over the grid; each row owns its state
    std::vector<Row> rows(total);
    {
        std::atomic<std::size_t> next{0};
        const std::size_t workers =
            std::min<std::size_t>(total, std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t flat = next.fetch_add(1); flat < total;
                     flat = next.fetch_add(1)) {
                    rows[flat] = run_point(flat);
                }
            });
        }
        for (auto& worker : pool) worker.join();
    }

    std::ostringstream csv;
    csv << "row";
    for (const auto& axis : axes) csv << "," << axis.key;
    csv << ",status,worst_rms_fraction,post_fault_rms_fraction,max_applied_rate,"
           "max_command_rate,oscillation_index_total,f_max,h_max,e2_residual_max\n";

    bool any_failed = false;
    for (std::size_t flat = 0; flat < total; ++flat) {
        const Row& row = rows[flat];
        any_failed = any_failed || row.failed;
        csv << flat;
        for (const double v : row.point) csv << "," << format_double(v);
        if (row.failed) {
            std::string status = row.status;
            for (auto& c : status) {
                if (c == ',' || c == '\n') c = ';';
            }
            csv << "," << status << ",,,,,,,,\n";
            continue;
        }
        csv << ",ok";
        csv << "," << format_double(worst_tracking_fraction(row.m));
        csv << "," << format_double(post_fault_tracking_fraction(row.m));
        csv << "," << format_double(row.m.max_applied_rate.maxCoeff());
        csv << "," << format_double(row.m.max_command_rate.maxCoeff());
        csv << "," << format_double(row.m.oscillation_index.sum());
        csv << "," << format_double(row.m.f_max);
        csv << "," << format_double(row.m.h_max);
        csv << "," << format_double(row.m.e2_residual_max);
        csv << "\n";
    }

    try {
        const fs::path out_dir(options.out_dir);
        fs::create_directories(out_dir);
        write_file(out_dir / "sweep.csv", csv.str());
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitBadConfig;
    }
    std::cout << "wrote " << (fs::path(options.out_dir) / "sweep.csv").string() << " (" << total
              << " rows)\n";
    return any_failed ? kExitCheckFailed : kExitOk;
}

}  // namespace caproj
