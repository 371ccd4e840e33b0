#ifndef BOAC_EXPERIMENT_RUNNER_HPP
#define BOAC_EXPERIMENT_RUNNER_HPP

#include <algorithm>
#include <bit>
#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "boac/experiment/config.hpp"
#include "boac/experiment/results.hpp"
#include "boac/solver/grid_oracle.hpp"
#include "boac/solver/recovery.hpp"

namespace boac
{

/// Where and how a run executes. An empty out_dir keeps everything in memory.
struct RunContext
{
    std::filesystem::path out_dir;
    int threads = 1;
    /// Reuse finished cells from out_dir/checkpoint.jsonl.
    bool resume = true;
};

struct RunReport
{
    ResultTable table;
    std::vector<std::string> warnings;
    /// Cells or runs that completed but should not be trusted.
    std::vector<std::string> flagged;
    /// Files written, relative to out_dir.
    std::vector<std::string> files;
    Index resumed_items = 0;

    bool has_flags() const noexcept { return !flagged.empty(); }
};

namespace detail
{

inline constexpr std::uint64_t kSweepStream = 0x7377656570;
inline constexpr std::uint64_t kOracleStream = 0x6f7261636c;
inline constexpr std::uint64_t kFeelStream = 0x6665656c;

inline std::uint64_t real_tag(double x) { return std::bit_cast<std::uint64_t>(x); }

inline Checkpoint open_checkpoint(const ExperimentConfig& cfg, const RunContext& ctx)
{
    if (ctx.out_dir.empty()) {
        return {};
    }
    const auto path = ctx.out_dir / "checkpoint.jsonl";
    if (!ctx.resume) {
        std::filesystem::remove(path);
    }
    return Checkpoint(path, fnv1a(to_json(cfg).dump()));
}

inline std::string cell_key(Index l, int k, double snr, const std::string& param = {})
{
    return "L=" + std::to_string(l) + ",K=" + std::to_string(k) + ",snr=" + format_real(snr) +
           (param.empty() ? "" : ",param=" + param);
}

inline void write_outputs(const ExperimentConfig& cfg, const RunContext& ctx, RunReport& report,
                          Json extra = Json::object())
{
    if (ctx.out_dir.empty()) {
        return;
    }
    write_text_file(ctx.out_dir / "results.csv", report.table.to_csv());
    report.files.insert(report.files.begin(), "results.csv");
    Json manifest{{"experiment", to_string(cfg.kind)},
                  {"config", to_json(cfg)},
                  {"outputs", report.files},
                  {"warnings", report.warnings},
                  {"flagged", report.flagged}};
    for (auto& item : extra.items()) {
        manifest[item.key()] = item.value();
    }
    write_text_file(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
    report.files.push_back("manifest.json");
}

} // namespace detail

/// One Monte Carlo draw of the sum-recovery problem: K devices, one element
/// with amplitudes U[low, high], random delays and fading, waveform and
/// noise at the target SNR, recovered by the atomic-norm SDP.
struct SumTrial
{
    double truth = 0.0;
    double estimate = 0.0;
    double nmse = 0.0;
    double abs_error = 0.0;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    bool threw = false;
    std::string error;
};

inline SumTrial run_sum_trial(Index length, int users, double snr_db, std::uint64_t seed,
                              const ChannelSettings& channel, const SolverConfig& solver,
                              const LambdaPolicy& lambda)
{
    SumTrial t;
    try {
        const auto grid = SampleGrid::with_length(length);
        Rng rng(derive_seed(seed, {1}));
        RMatrix amplitudes(1, users);
        for (int k = 0; k < users; ++k) {
            amplitudes(0, k) = rng.uniform(channel.amplitude_low, channel.amplitude_high);
        }
        const auto ch = draw_channel(users, derive_seed(seed, {2}), channel.fading);
        const auto pg = precode(amplitudes, 0.0, ch);
        TransmitOptions tx;
        tx.noise = channel.noise;
        const auto rm = transmit_round(pg, ch, grid, snr_db, derive_seed(seed, {3}), tx);
        const auto problem = make_denoise_problem(rm, 0, lambda);
        const auto sol = atomic_denoise(problem, solver);
        t.truth = amplitudes.sum();
        t.estimate = sol.atomic_norm_value;
        t.abs_error = std::abs(t.estimate - t.truth);
        t.nmse = t.abs_error * t.abs_error / (t.truth * t.truth);
        t.lambda = problem.lambda();
        t.iterations = sol.iterations;
        t.converged = sol.converged;
    } catch (const std::exception& e) {
        t.threw = true;
        t.error = e.what();
    }
    return t;
}

/// Runs `trials` seeded draws of one cell and appends nmse, abs_error and
/// failure_rate rows. A trial fails when the solver throws or stops without
/// converging; thrown trials carry no estimate and are left out of the
/// error statistics, unconverged ones are kept.
inline Json run_sum_cell(Index length, int users, double snr_db, int trials, std::uint64_t cell_seed,
                         const ExperimentConfig& cfg, const LambdaPolicy& lambda, int threads)
{
    std::vector<SumTrial> out(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](Index i) {
        out[static_cast<std::size_t>(i)] =
            run_sum_trial(length, users, snr_db, derive_seed(cell_seed, {static_cast<std::uint64_t>(i)}),
                          cfg.channel, cfg.solver, lambda);
    });
    std::vector<double> nmse;
    std::vector<double> err;
    int failures = 0;
    std::string first_error;
    for (const auto& t : out) {
        if (t.threw || !t.converged) {
            ++failures;
        }
        if (t.threw) {
            if (first_error.empty()) {
                first_error = t.error;
            }
            continue;
        }
        nmse.push_back(t.nmse);
        err.push_back(t.abs_error);
    }
    const auto sn = summarize(nmse);
    const auto se = summarize(err);
    const double rate = static_cast<double>(failures) / trials;
    return Json{{"nmse", {real_to_json(sn.mean), sn.count, sn.stderr_value}},
                {"abs_error", {real_to_json(se.mean), se.count, se.stderr_value}},
                {"failure_rate", {rate, trials, std::sqrt(rate * (1.0 - rate) / trials)}},
                {"error", first_error}};
}

namespace detail
{

inline void add_cell_rows(RunReport& report, const std::string& experiment, Index l, int k,
                          double snr, const std::string& param, const Json& cell)
{
    for (const char* stat : {"nmse", "abs_error", "failure_rate"}) {
        const auto& v = cell.at(stat);
        report.table.add({experiment, l, k, snr, param, stat, real_from_json(v[0], stat),
                          v[1].get<int>(), v[2].get<double>()});
    }
}

inline bool cell_flagged(const Json& cell, double limit)
{
    return cell.at("failure_rate")[0].get<double>() > limit || cell.at("nmse")[1].get<int>() == 0;
}

} // namespace detail

/// NMSE of the recovered amplitude sum over the (L, K, SNR) grid.
inline RunReport run_nmse_sweep(const ExperimentConfig& cfg, const RunContext& ctx = {})
{
    if (cfg.kind != ExperimentKind::NmseVsSnrL && cfg.kind != ExperimentKind::NmseVsSnrK) {
        throw ConfigError("run_nmse_sweep: experiment must be nmse_vs_snr_L or nmse_vs_snr_K");
    }
    cfg.validate();
    RunReport report;
    Checkpoint cp = detail::open_checkpoint(cfg, ctx);
    const std::string name = to_string(cfg.kind);
    for (Index l : cfg.sweep.lengths) {
        for (int k : cfg.sweep.users) {
            for (double snr : cfg.sweep.snr_db) {
                const std::string key = detail::cell_key(l, k, snr);
                Json cell;
                if (const Json* done = cp.find(key)) {
                    cell = *done;
                    ++report.resumed_items;
                } else {
                    const auto seed = derive_seed(cfg.seed, {detail::kSweepStream, static_cast<std::uint64_t>(l),
                                                             static_cast<std::uint64_t>(k),
                                                             detail::real_tag(snr)});
                    cell = run_sum_cell(l, k, snr, cfg.sweep.trials, seed, cfg, cfg.lambda, ctx.threads);
                    cp.record(key, cell);
                }
                detail::add_cell_rows(report, name, l, k, snr, "", cell);
                if (detail::cell_flagged(cell, cfg.sweep.flag_failure_fraction)) {
                    std::string msg = key + ": failure rate " +
                                      format_real(cell.at("failure_rate")[0].get<double>());
                    if (!cell.at("error").get<std::string>().empty()) {
                        msg += " (" + cell.at("error").get<std::string>() + ")";
                    }
                    report.flagged.push_back(msg);
                }
            }
        }
    }
    detail::write_outputs(cfg, ctx, report);
    return report;
}

struct CalibrationOutcome
{
    double selected_scale = kDefaultLambdaScale;
    /// (max - min) / min of the per-scale mean NMSE.
    double spread = 0.0;
    bool flat = false;
    std::vector<double> mean_nmse;
};

/// Sweeps the lambda scale at the reference cell and picks the minimizer of
/// the NMSE averaged over the configured SNRs. Noiseless SNRs are skipped
/// because lambda does not depend on the scale there. Every scale sees the
/// same instances.
inline RunReport run_lambda_calibration(const ExperimentConfig& cfg, const RunContext& ctx = {},
                                        CalibrationOutcome* outcome = nullptr)
{
    if (cfg.kind != ExperimentKind::LambdaCalibration) {
        throw ConfigError("run_lambda_calibration: experiment must be lambda_calibration");
    }
    cfg.validate();
    const auto& c = cfg.calibration;
    RunReport report;
    Checkpoint cp = detail::open_checkpoint(cfg, ctx);
    std::vector<double> snrs;
    for (double s : c.snr_db) {
        if (std::isinf(s)) {
            report.warnings.push_back("noiseless SNR skipped in lambda calibration");
        } else {
            snrs.push_back(s);
        }
    }
    if (snrs.empty()) {
        throw ConfigError("calibration: every SNR is noiseless, nothing to calibrate");
    }
    CalibrationOutcome res;
    for (double scale : c.scale_grid) {
        LambdaPolicy policy = cfg.lambda;
        policy.scale_c = scale;
        const std::string param = "scale_c=" + format_real(scale);
        double total = 0.0;
        for (double snr : snrs) {
            const std::string key = detail::cell_key(c.length, c.users, snr, param);
            Json cell;
            if (const Json* done = cp.find(key)) {
                cell = *done;
                ++report.resumed_items;
            } else {
                const auto seed = derive_seed(cfg.seed, {detail::kSweepStream, static_cast<std::uint64_t>(c.length),
                                                         static_cast<std::uint64_t>(c.users),
                                                         detail::real_tag(snr)});
                cell = run_sum_cell(c.length, c.users, snr, c.trials, seed, cfg, policy, ctx.threads);
                cp.record(key, cell);
            }
            detail::add_cell_rows(report, "lambda_calibration", c.length, c.users, snr, param, cell);
            if (detail::cell_flagged(cell, cfg.sweep.flag_failure_fraction)) {
                report.flagged.push_back(key + ": failure rate " +
                                         format_real(cell.at("failure_rate")[0].get<double>()));
            }
            total += real_from_json(cell.at("nmse")[0], "nmse");
        }
        res.mean_nmse.push_back(total / static_cast<double>(snrs.size()));
    }
    const auto best = std::min_element(res.mean_nmse.begin(), res.mean_nmse.end());
    const double hi = *std::max_element(res.mean_nmse.begin(), res.mean_nmse.end());
    res.spread = (hi - *best) / *best;
    res.flat = !(res.spread >= c.flat_spread);
    if (res.flat) {
        res.selected_scale = 1.0;
        report.warnings.push_back("lambda calibration is flat (spread " + format_real(res.spread) +
                                  "); keeping scale_c = 1");
    } else {
        res.selected_scale = c.scale_grid[static_cast<std::size_t>(best - res.mean_nmse.begin())];
    }
    for (std::size_t i = 0; i < c.scale_grid.size(); ++i) {
        report.table.add({"lambda_calibration", c.length, c.users, snrs.front(),
                          "scale_c=" + format_real(c.scale_grid[i]), "mean_nmse_over_snr", res.mean_nmse[i],
                          c.trials, 0.0});
    }
    report.table.add({"lambda_calibration", c.length, c.users, snrs.front(), "", "selected_scale_c",
                      res.selected_scale, c.trials, 0.0});
    report.table.add({"lambda_calibration", c.length, c.users, snrs.front(), "", "relative_spread",
                      res.spread, c.trials, 0.0});

    if (!ctx.out_dir.empty()) {
        LambdaPolicy chosen = cfg.lambda;
        chosen.scale_c = res.selected_scale;
        ExperimentConfig fragment = cfg;
        fragment.lambda = chosen;
        const Json j = to_json(fragment);
        write_text_file(ctx.out_dir / "calibrated_solver.json",
                        Json{{"solver", j.at("solver")}, {"lambda", j.at("lambda")}}.dump(2) + "\n");
        report.files.push_back("calibrated_solver.json");
    }
    detail::write_outputs(cfg, ctx, report,
                          Json{{"selected_scale_c", res.selected_scale},
                               {"relative_spread", res.spread},
                               {"flat", res.flat}});
    if (outcome) {
        *outcome = res;
    }
    return report;
}

/// Relative objective gap between the SDP and the gridded lasso on random
/// instances; rows max_gap, mean_gap and pass_fraction per SNR.
inline RunReport run_oracle_check(const ExperimentConfig& cfg, const RunContext& ctx = {})
{
    if (cfg.kind != ExperimentKind::SolverOracleCheck) {
        throw ConfigError("run_oracle_check: experiment must be solver_oracle_check");
    }
    cfg.validate();
    const auto& o = cfg.oracle;
    RunReport report;
    Checkpoint cp = detail::open_checkpoint(cfg, ctx);
    const auto grid = SampleGrid::with_length(o.length);
    for (double snr : o.snr_db) {
        const std::string key = detail::cell_key(o.length, o.users, snr);
        Json cell;
        if (const Json* done = cp.find(key)) {
            cell = *done;
            ++report.resumed_items;
        } else {
            std::vector<double> gaps(static_cast<std::size_t>(o.trials));
            const auto seed = derive_seed(cfg.seed, {detail::kOracleStream, detail::real_tag(snr)});
            parallel_for(o.trials, ctx.threads, [&](Index i) {
                const auto s = derive_seed(seed, {static_cast<std::uint64_t>(i)});
                Rng rng(derive_seed(s, {1}));
                RMatrix amplitudes(1, o.users);
                for (int k = 0; k < o.users; ++k) {
                    amplitudes(0, k) = rng.uniform(cfg.channel.amplitude_low, cfg.channel.amplitude_high);
                }
                const auto ch = draw_channel(o.users, derive_seed(s, {2}), cfg.channel.fading);
                TransmitOptions tx;
                tx.noise = cfg.channel.noise;
                const auto rm =
                    transmit_round(precode(amplitudes, 0.0, ch), ch, grid, snr, derive_seed(s, {3}), tx);
                const auto problem = make_denoise_problem(rm, 0, cfg.lambda);
                const double sdp = atomic_denoise(problem, cfg.solver).objective;
                const double gridded = grid_oracle(problem, o.grid_points).diagnostics.objective;
                gaps[static_cast<std::size_t>(i)] = std::abs(sdp - gridded) / (1.0 + gridded);
            });
            const auto sg = summarize(gaps);
            const double worst = *std::max_element(gaps.begin(), gaps.end());
            const auto passed = std::count_if(gaps.begin(), gaps.end(), [&](double g) { return g <= o.tolerance; });
            cell = Json{{"max_gap", worst},
                        {"mean_gap", sg.mean},
                        {"mean_gap_stderr", sg.stderr_value},
                        {"pass_fraction", static_cast<double>(passed) / o.trials}};
            cp.record(key, cell);
        }
        report.table.add({"solver_oracle_check", o.length, o.users, snr, "", "max_gap",
                          cell.at("max_gap").get<double>(), o.trials, 0.0});
        report.table.add({"solver_oracle_check", o.length, o.users, snr, "", "mean_gap",
                          cell.at("mean_gap").get<double>(), o.trials, cell.at("mean_gap_stderr").get<double>()});
        report.table.add({"solver_oracle_check", o.length, o.users, snr, "", "pass_fraction",
                          cell.at("pass_fraction").get<double>(), o.trials, 0.0});
        if (cell.at("max_gap").get<double>() > o.tolerance) {
            report.flagged.push_back(key + ": objective gap " + format_real(cell.at("max_gap").get<double>()) +
                                     " exceeds " + format_real(o.tolerance));
        }
    }
    detail::write_outputs(cfg, ctx, report);
    return report;
}

/// Data, partition and initial model for one FEEL seed. Everything is drawn
/// from the seed alone, so every aggregation mode trains the same problem.
struct FeelInstance
{
    std::vector<LocalDataset> devices;
    Dataset test;
    ModelParams model;
    std::uint64_t training_seed = 0;
};

inline FeelInstance make_feel_instance(const FeelSettings& f, std::uint64_t seed)
{
    FeelInstance inst;
    Dataset train_set;
    if (f.task == "blobs") {
        BlobOptions test_opt = f.blobs;
        test_opt.per_class = f.test_per_class;
        const auto centers = derive_seed(seed, {0});
        train_set = make_blobs(f.blobs, centers, derive_seed(seed, {1}));
        inst.test = make_blobs(test_opt, centers, derive_seed(seed, {2}));
    } else {
        train_set = load_idx(f.idx_train_images, f.idx_train_labels, f.idx);
        IdxOptions test_opt = f.idx;
        test_opt.limit = 0;
        inst.test = load_idx(f.idx_test_images, f.idx_test_labels, test_opt);
    }
    if (f.partition == "iid") {
        inst.devices = partition_iid(train_set, f.devices, derive_seed(seed, {3}));
    } else {
        inst.devices = partition_label_skew(train_set, f.devices, f.shards_per_device, derive_seed(seed, {3}));
    }
    check_partition(inst.devices, train_set.size());
    const MlpShape shape{train_set.dims(), f.hidden, std::max(train_set.classes, inst.test.classes),
                         f.activation};
    inst.model = init_model(shape, derive_seed(seed, {4}));
    inst.training_seed = derive_seed(seed, {5});
    return inst;
}

inline TrainingConfig feel_training_config(const ExperimentConfig& cfg, const FeelRunSpec& run,
                                           std::uint64_t training_seed, int threads)
{
    const auto& f = cfg.feel;
    TrainingConfig t;
    t.rounds = f.rounds;
    t.learning_rate = f.learning_rate;
    t.gamma_margin = f.gamma_margin;
    t.mode = run.mode;
    t.grid_length = run.length;
    t.snr_db = f.snr_db;
    t.batch_size = f.batch_size;
    t.seed = training_seed;
    t.fading = cfg.channel.fading;
    t.blind.reuse_subset = f.reuse_subset;
    t.blind.solver = cfg.solver;
    t.blind.lambda = cfg.lambda;
    t.transmit.noise = cfg.channel.noise;
    t.threads = threads;
    return t;
}

namespace detail
{

inline Json round_log_to_json(const RoundLog& r)
{
    return Json{{"round", r.round},
                {"nmse", real_to_json(r.nmse)},
                {"train_loss", real_to_json(r.train_loss)},
                {"test_loss", real_to_json(r.test_loss)},
                {"accuracy", r.accuracy},
                {"gamma", r.gamma},
                {"mean_lambda", r.mean_lambda},
                {"solver_failures", r.solver_failures},
                {"wall_ms", r.wall_ms},
                {"warning", r.warning}};
}

} // namespace detail

/// Trains every configured run on every seed. Writes rounds.csv (one row per
/// round, deterministic), timing.csv (wall clock, not reproducible) and a
/// summary table with final_accuracy, final_test_loss, mean_nmse,
/// initial_accuracy and diverged_fraction per run.
inline RunReport run_feel_benchmark(const ExperimentConfig& cfg, const RunContext& ctx = {})
{
    if (cfg.kind != ExperimentKind::FeelBenchmark) {
        throw ConfigError("run_feel_benchmark: experiment must be feel_benchmark");
    }
    cfg.validate();
    const auto& f = cfg.feel;
    RunReport report;
    Checkpoint cp = detail::open_checkpoint(cfg, ctx);

    std::ostringstream rounds_csv;
    std::ostringstream timing_csv;
    rounds_csv << "run,mode,L,seed,round,nmse,train_loss,test_loss,accuracy,gamma,mean_lambda,"
                  "solver_failures,warning\n";
    timing_csv << "run,seed,round,wall_ms\n";
    Json seeds = Json::array();

    std::vector<FeelInstance> instances;
    for (int s = 0; s < f.seeds; ++s) {
        const auto seed = derive_seed(cfg.seed, {detail::kFeelStream, static_cast<std::uint64_t>(s)});
        instances.push_back(make_feel_instance(f, seed));
        seeds.push_back(Json{{"index", s}, {"instance_seed", seed},
                             {"training_seed", instances.back().training_seed}});
    }

    for (const auto& run : f.runs) {
        std::vector<double> final_acc;
        std::vector<double> final_loss;
        std::vector<double> init_acc;
        std::vector<double> nmse;
        int diverged = 0;
        for (int s = 0; s < f.seeds; ++s) {
            const auto& inst = instances[static_cast<std::size_t>(s)];
            const std::string key = "run=" + run.label + ",seed=" + std::to_string(s);
            Json payload;
            if (const Json* done = cp.find(key)) {
                payload = *done;
                ++report.resumed_items;
            } else {
                const auto tc = feel_training_config(cfg, run, inst.training_seed, ctx.threads);
                const TrainingResult tr = train(tc, inst.model, inst.devices, inst.test);
                Json logs = Json::array();
                for (const auto& r : tr.rounds) {
                    logs.push_back(detail::round_log_to_json(r));
                }
                payload = Json{{"initial_accuracy", tr.initial.accuracy},
                               {"diverged", tr.diverged},
                               {"rounds", logs}};
                cp.record(key, payload);
            }
            init_acc.push_back(payload.at("initial_accuracy").get<double>());
            const auto& logs = payload.at("rounds");
            int warned = 0;
            for (const auto& r : logs) {
                rounds_csv << csv_field(run.label) << ',' << to_string(run.mode) << ',' << run.length << ','
                           << s << ',' << r.at("round").get<int>() << ','
                           << format_real(real_from_json(r.at("nmse"), "nmse")) << ','
                           << format_real(real_from_json(r.at("train_loss"), "train_loss")) << ','
                           << format_real(real_from_json(r.at("test_loss"), "test_loss")) << ','
                           << format_real(r.at("accuracy").get<double>()) << ','
                           << format_real(r.at("gamma").get<double>()) << ','
                           << format_real(r.at("mean_lambda").get<double>()) << ','
                           << r.at("solver_failures").get<Index>() << ','
                           << csv_field(r.at("warning").get<std::string>()) << '\n';
                timing_csv << csv_field(run.label) << ',' << s << ',' << r.at("round").get<int>() << ','
                           << format_real(r.at("wall_ms").get<double>()) << '\n';
                nmse.push_back(real_from_json(r.at("nmse"), "nmse"));
                if (!r.at("warning").get<std::string>().empty()) {
                    ++warned;
                }
            }
            if (warned > 0) {
                report.warnings.push_back(key + ": " + std::to_string(warned) + " rounds with warnings");
            }
            if (payload.at("diverged").get<bool>()) {
                ++diverged;
                report.flagged.push_back(key + ": training diverged");
            }
            if (logs.empty()) {
                final_acc.push_back(0.0);
                final_loss.push_back(std::numeric_limits<double>::infinity());
            } else {
                final_acc.push_back(logs.back().at("accuracy").get<double>());
                final_loss.push_back(real_from_json(logs.back().at("test_loss"), "test_loss"));
            }
        }
        auto add = [&](const char* stat, const std::vector<double>& xs) {
            const auto sm = summarize(xs);
            report.table.add({"feel_benchmark", run.length, f.devices, f.snr_db, run.label, stat, sm.mean,
                              sm.count, sm.stderr_value});
        };
        add("final_accuracy", final_acc);
        add("final_test_loss", final_loss);
        add("mean_nmse", nmse);
        add("initial_accuracy", init_acc);
        report.table.add({"feel_benchmark", run.length, f.devices, f.snr_db, run.label, "diverged_fraction",
                          static_cast<double>(diverged) / f.seeds, f.seeds, 0.0});
    }
    if (!ctx.out_dir.empty()) {
        write_text_file(ctx.out_dir / "rounds.csv", rounds_csv.str());
        write_text_file(ctx.out_dir / "timing.csv", timing_csv.str());
        report.files.push_back("rounds.csv");
        report.files.push_back("timing.csv");
    }
    detail::write_outputs(cfg, ctx, report, Json{{"seeds", seeds}});
    return report;
}

inline RunReport run_experiment(const ExperimentConfig& cfg, const RunContext& ctx = {})
{
    switch (cfg.kind) {
    case ExperimentKind::NmseVsSnrL:
    case ExperimentKind::NmseVsSnrK:
        return run_nmse_sweep(cfg, ctx);
    case ExperimentKind::FeelBenchmark:
        return run_feel_benchmark(cfg, ctx);
    case ExperimentKind::LambdaCalibration:
        return run_lambda_calibration(cfg, ctx);
    case ExperimentKind::SolverOracleCheck:
        return run_oracle_check(cfg, ctx);
    }
    throw ConfigError("unknown experiment kind");
}

} // namespace boac

#endif
