#include <CLI11.hpp>

#include "caproj/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Adaptive control allocation with magnitude- and rate-bounded projection"};
    app.require_subcommand(1);

    caproj::RunOptions run_options;
    auto* run = app.add_subcommand("run", "Simulate one closed-loop scenario");
    run->add_option("--case", run_options.case_text, "Scenario case: I, II or III")
        ->capture_default_str();
    run->add_option("--config", run_options.config_path, "JSON config file");
    run->add_option("--out", run_options.out_dir, "Output directory")
        ->envname("CAPROJ_OUT")
        ->capture_default_str();
    run->add_option("--dt", run_options.dt, "Integration step (s)");
    run->add_option("--duration", run_options.duration, "Simulation horizon (s)");

    caproj::VerifyOptions verify_options;
    auto* verify = app.add_subcommand("verify", "Run the projection property checks");
    verify->add_option("--config", verify_options.config_path, "JSON config file");
    verify->add_option("--only", verify_options.only,
                       "Run a single check: lemma2, lemma6, invariance, continuity, lipschitz");
    verify->add_option("--seed", verify_options.seed, "Random seed")->capture_default_str();
    verify->add_option("--out", verify_options.out_dir, "Also write verify.txt here")
        ->envname("CAPROJ_OUT");

    caproj::SweepOptions sweep_options;
    auto* sweep = app.add_subcommand("sweep", "Run a scenario grid and collect metrics");
    sweep->add_option("--case", sweep_options.case_text, "Scenario case: I, II or III")
        ->capture_default_str();
    sweep->add_option("--config", sweep_options.config_path, "JSON config file");
    sweep->add_option("--out", sweep_options.out_dir, "Output directory")
        ->envname("CAPROJ_OUT")
        ->capture_default_str();
    sweep->add_option("--grid", sweep_options.grid,
                      "Parameter grid, e.g. --grid gamma=20,40 --grid fault_loss=0,0.3");
    sweep->add_option("--dt", sweep_options.dt, "Integration step (s)");
    sweep->add_option("--duration", sweep_options.duration, "Simulation horizon (s)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return caproj::cmd_run(run_options);
    if (verify->parsed()) return caproj::cmd_verify(verify_options);
    if (sweep->parsed()) return caproj::cmd_sweep(sweep_options);
    return 0;
}
