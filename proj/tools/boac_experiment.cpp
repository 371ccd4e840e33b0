// Command-line front end for the batch experiments.
//
// Exit status: 0 on success, 2 when the run completed with flagged cells,
// 1 on fatal errors (bad config, I/O failure, unexpected exceptions).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "boac/experiment/runner.hpp"

namespace
{

struct CommonArgs
{
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool no_resume = false;
};

void add_common(CLI::App* sub, CommonArgs& args, bool config_required)
{
    auto* opt = sub->add_option("--config", args.config, "JSON experiment config");
    if (config_required) {
        opt->required();
    }
    opt->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory")->required();
    sub->add_option("--seed", args.seed, "master seed, overrides the config");
    sub->add_option("--threads", args.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--no-resume", args.no_resume, "ignore and discard an existing checkpoint");
}

boac::ExperimentConfig resolve_config(const CommonArgs& args, boac::ExperimentKind fallback)
{
    boac::ExperimentConfig cfg;
    if (args.config.empty()) {
        cfg = boac::parse_config(boac::Json{{"schema_version", boac::kConfigSchemaVersion},
                                            {"experiment", boac::to_string(fallback)}});
    } else {
        cfg = boac::load_config(args.config);
    }
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    return cfg;
}

int execute(const boac::ExperimentConfig& cfg, const CommonArgs& args)
{
    boac::RunContext ctx;
    ctx.out_dir = args.out;
    ctx.threads = args.threads;
    ctx.resume = !args.no_resume;
    const auto report = boac::run_experiment(cfg, ctx);
    std::cout << boac::to_string(cfg.kind) << ": " << report.table.size() << " result rows";
    if (report.resumed_items > 0) {
        std::cout << " (" << report.resumed_items << " items resumed from checkpoint)";
    }
    std::cout << "\n";
    for (const auto& f : report.files) {
        std::cout << "  wrote " << (ctx.out_dir / f).string() << "\n";
    }
    for (const auto& w : report.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    for (const auto& f : report.flagged) {
        std::cerr << "flagged: " << f << "\n";
    }
    return report.has_flags() ? 2 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Blind over-the-air aggregation experiments"};
    app.require_subcommand(1);

    CommonArgs sweep_args;
    CommonArgs feel_args;
    CommonArgs calib_args;
    CommonArgs oracle_args;
    auto* sweep = app.add_subcommand("sweep-nmse", "NMSE versus SNR over an L or K grid");
    auto* feel = app.add_subcommand("feel", "federated training benchmark");
    auto* calib = app.add_subcommand("calibrate-lambda", "sweep the regularization scale");
    auto* oracle = app.add_subcommand("oracle-check", "compare the SDP against the gridded oracle");
    add_common(sweep, sweep_args, false);
    add_common(feel, feel_args, false);
    add_common(calib, calib_args, false);
    add_common(oracle, oracle_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sweep) {
            auto cfg = resolve_config(sweep_args, boac::ExperimentKind::NmseVsSnrL);
            if (cfg.kind != boac::ExperimentKind::NmseVsSnrL && cfg.kind != boac::ExperimentKind::NmseVsSnrK) {
                throw boac::ConfigError("sweep-nmse needs an nmse_vs_snr_L or nmse_vs_snr_K config");
            }
            return execute(cfg, sweep_args);
        }
        if (*feel) {
            auto cfg = resolve_config(feel_args, boac::ExperimentKind::FeelBenchmark);
            if (cfg.kind != boac::ExperimentKind::FeelBenchmark) {
                throw boac::ConfigError("feel needs a feel_benchmark config");
            }
            return execute(cfg, feel_args);
        }
        if (*calib) {
            auto cfg = resolve_config(calib_args, boac::ExperimentKind::LambdaCalibration);
            if (cfg.kind != boac::ExperimentKind::LambdaCalibration) {
                throw boac::ConfigError("calibrate-lambda needs a lambda_calibration config");
            }
            return execute(cfg, calib_args);
        }
        auto cfg = resolve_config(oracle_args, boac::ExperimentKind::SolverOracleCheck);
        if (cfg.kind != boac::ExperimentKind::SolverOracleCheck) {
            throw boac::ConfigError("oracle-check needs a solver_oracle_check config");
        }
        return execute(cfg, oracle_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
