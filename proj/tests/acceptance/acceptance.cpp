// Acceptance suite. Each criterion prints exactly one PASS/FAIL line; the
// process exits non-zero if any selected criterion fails.
//
//   acceptance                    run all nine
//   acceptance --criterion 4      run one
//   acceptance --out DIR          where intermediate tables are written

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boac/experiment/runner.hpp"

using namespace boac;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome(const fs::path&, int)> run;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

ExperimentConfig base_config(ExperimentKind kind)
{
    return parse_config(Json{{"schema_version", kConfigSchemaVersion}, {"experiment", to_string(kind)}});
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 1. Partition of unity and on-grid collapse of the sampled atoms.
Outcome atom_identities(const fs::path&, int)
{
    Rng rng(20261014);
    double worst_sum = 0.0;
    double worst_grid = 0.0;
    for (Index l : {5, 9, 17, 33, 129}) {
        const auto grid = SampleGrid::with_length(l);
        for (int i = 0; i < 1000; ++i) {
            const Complex s = dirichlet_atom(rng.uniform(), grid).values.sum();
            worst_sum = std::max(worst_sum, std::abs(s - Complex(1.0, 0.0)));
        }
        for (Index m = 0; m < l; ++m) {
            CVector e = CVector::Zero(l);
            e(grid.wrapped_storage_index(m)) = 1.0;
            const CVector a = dirichlet_atom(static_cast<double>(m) / static_cast<double>(l), grid).values;
            worst_grid = std::max(worst_grid, (a - e).cwiseAbs().maxCoeff());
        }
    }
    return {worst_sum <= 1e-12 && worst_grid <= 1e-12,
            "max |sum a - 1| = " + fmt("%.2e", worst_sum) + ", max on-grid deviation = " + fmt("%.2e", worst_grid)};
}

// 2. Noiseless recovery of the amplitude sum through the full uplink, with
// delays spread over [0, 1) or packed inside one 1/L bin.
Outcome noiseless_recovery(const fs::path&, int threads)
{
    struct Case
    {
        Index l;
        int k;
    };
    double worst = 0.0;
    int solves = 0;
    std::string where;
    for (const Case c : {Case{17, 3}, Case{33, 5}, Case{65, 10}}) {
        const auto grid = SampleGrid::with_length(c.l);
        for (int clustered = 0; clustered < 2; ++clustered) {
            std::vector<double> err(50);
            parallel_for(50, threads, [&](Index t) {
                const auto seed = derive_seed(2, {static_cast<std::uint64_t>(c.l), static_cast<std::uint64_t>(clustered),
                                                  static_cast<std::uint64_t>(t)});
                Rng rng(seed);
                auto ch = draw_channel(c.k, derive_seed(seed, {1}));
                if (clustered) {
                    const double centre = rng.uniform();
                    for (auto& tau : ch.tau) {
                        tau = wrap_delay(centre + rng.uniform(0.0, 1.0 / static_cast<double>(c.l)));
                    }
                }
                RMatrix amp(1, c.k);
                for (int k = 0; k < c.k; ++k) {
                    amp(0, k) = rng.uniform(0.5, 1.5);
                }
                const auto rm = transmit_round(precode(amp, 0.0, ch), ch, grid,
                                               std::numeric_limits<double>::infinity(), derive_seed(seed, {2}));
                const double s = amp.sum();
                const double est = atomic_denoise(make_denoise_problem(rm, 0)).atomic_norm_value;
                err[static_cast<std::size_t>(t)] = std::abs(est - s) / (1.0 + s);
            });
            for (double e : err) {
                if (e > worst) {
                    worst = e;
                    where = "L=" + std::to_string(c.l) + " K=" + std::to_string(c.k) +
                            (clustered ? " clustered" : " spread");
                }
            }
            solves += 50;
        }
    }
    return {worst <= 1e-3, std::to_string(solves) + " instances, max |s_hat - s|/(1+|s|) = " + fmt("%.2e", worst) +
                               (where.empty() ? "" : " (" + where + ")")};
}

// 3. SDP objective against the 960-point gridded lasso at L = 15.
Outcome oracle_equivalence(const fs::path& out, int threads)
{
    auto cfg = base_config(ExperimentKind::SolverOracleCheck);
    cfg.oracle.length = 15;
    cfg.oracle.trials = 25;
    cfg.oracle.snr_db = {10.0, 20.0};
    cfg.oracle.grid_points = 960;
    cfg.oracle.tolerance = 1e-2;
    const auto rep = run_oracle_check(cfg, {out, threads, false});
    double worst = 0.0;
    for (const auto& r : rep.table.select("max_gap")) {
        worst = std::max(worst, r.value);
    }
    return {worst <= 1e-2 && !rep.has_flags(),
            "25 instances per SNR in {10, 20} dB, max gap/(1+objective) = " + fmt("%.2e", worst)};
}

// 4. Slope of log mean |s_hat - s| against log L.
Outcome scaling_law(const fs::path& out, int threads)
{
    auto cfg = base_config(ExperimentKind::NmseVsSnrL);
    cfg.sweep.lengths = {9, 17, 33, 65, 129};
    cfg.sweep.users = {5};
    cfg.sweep.snr_db = {10.0};
    cfg.sweep.trials = 100;
    const auto rep = run_nmse_sweep(cfg, {out, threads, false});
    std::vector<double> x;
    std::vector<double> y;
    for (Index l : cfg.sweep.lengths) {
        x.push_back(std::log(static_cast<double>(l)));
        y.push_back(std::log(rep.table.at(l, 5, 10.0, "abs_error").value));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope >= -0.65 && slope <= -0.35 && !rep.has_flags(),
            "slope = " + fmt("%.4f", slope) + " (band [-0.65, -0.35]), K=5, 10 dB, 100 trials"};
}

// 5. NMSE falls with SNR for every L and with L at 20 dB.
Outcome snr_trend(const fs::path& out, int threads)
{
    auto cfg = base_config(ExperimentKind::NmseVsSnrL);
    cfg.sweep.trials = 100;
    const auto rep = run_nmse_sweep(cfg, {out, threads, false});
    bool ok = !rep.has_flags();
    std::string detail;
    for (Index l : cfg.sweep.lengths) {
        int inversions = 0;
        bool within = true;
        for (std::size_t s = 0; s + 1 < cfg.sweep.snr_db.size(); ++s) {
            const auto& a = rep.table.at(l, 5, cfg.sweep.snr_db[s], "nmse");
            const auto& b = rep.table.at(l, 5, cfg.sweep.snr_db[s + 1], "nmse");
            if (b.value > a.value) {
                ++inversions;
                within = within && (b.value - a.value <= std::max(a.stderr_value, b.stderr_value));
            }
        }
        if (inversions > 1 || !within) {
            ok = false;
            detail += " L=" + std::to_string(l) + " has " + std::to_string(inversions) + " inversion(s);";
        }
    }
    const double n9 = rep.table.at(9, 5, 20.0, "nmse").value;
    const double n129 = rep.table.at(129, 5, 20.0, "nmse").value;
    ok = ok && n129 < n9;
    return {ok, "NMSE(L=9, 20 dB) = " + fmt("%.3e", n9) + ", NMSE(L=129, 20 dB) = " + fmt("%.3e", n129) +
                    (detail.empty() ? ", monotone in SNR for every L" : ";" + detail)};
}

// 6. NMSE grows with the number of users at L = 129, 12 dB.
Outcome user_trend(const fs::path& out, int threads)
{
    auto cfg = base_config(ExperimentKind::NmseVsSnrK);
    cfg.sweep.users = {10, 50};
    cfg.sweep.snr_db = {12.0};
    cfg.sweep.trials = 100;
    const auto rep = run_nmse_sweep(cfg, {out, threads, false});
    const auto& a = rep.table.at(129, 10, 12.0, "nmse");
    const auto& b = rep.table.at(129, 50, 12.0, "nmse");
    const double se = std::hypot(a.stderr_value, b.stderr_value);
    return {b.value - a.value >= 2.0 * se && !rep.has_flags(),
            "NMSE(K=10) = " + fmt("%.3e", a.value) + ", NMSE(K=50) = " + fmt("%.3e", b.value) +
                ", difference = " + fmt("%.1f", (b.value - a.value) / se) + " standard errors"};
}

// 7. Desk-scale FEEL benchmark, 5 seeds, 60 rounds, K = 10, 5 dB.
Outcome feel_benchmark(const fs::path& out, int threads)
{
    const auto cfg = base_config(ExperimentKind::FeelBenchmark);
    const auto rep = run_feel_benchmark(cfg, {out, threads, false});
    auto acc = [&](const std::string& label) { return rep.table.select("final_accuracy", label).front().value; };
    const double ideal = acc("ideal_sync");
    const double b129 = acc("blind_L129");
    const double b257 = acc("blind_L257");
    const double none = acc("no_recovery");
    const bool a = ideal - b257 <= 0.15;
    const bool b = b257 >= 2.0 * none || (none < 1.5 * 0.1 && b257 > 0.6);
    // A diverged NoRecovery run is an expected outcome; only the blind and
    // ideal runs must train cleanly.
    bool clean = true;
    for (const char* label : {"ideal_sync", "blind_L129", "blind_L257"}) {
        clean = clean && rep.table.select("diverged_fraction", label).front().value == 0.0;
    }
    return {a && b && clean, "final accuracy ideal " + fmt("%.3f", ideal) + ", blind L=129 " + fmt("%.3f", b129) +
                                 ", blind L=257 " + fmt("%.3f", b257) + ", no recovery " + fmt("%.3f", none) +
                                 " (5 seeds, 60 rounds)"};
}

// 8. Noiseless BlindFull reproduces IdealSync on the 162-parameter model.
Outcome noiseless_training(const fs::path&, int threads)
{
    auto cfg = base_config(ExperimentKind::FeelBenchmark);
    cfg.feel.blobs.dims = 8;
    cfg.feel.hidden = 8;
    const auto inst = make_feel_instance(cfg.feel, derive_seed(cfg.seed, {8}));
    if (inst.model.w.size() > 200) {
        return {false, "model has " + std::to_string(inst.model.w.size()) + " parameters"};
    }
    TrainingConfig tc;
    tc.rounds = 20;
    tc.grid_length = 33;
    tc.snr_db = std::numeric_limits<double>::infinity();
    tc.seed = inst.training_seed;
    tc.threads = threads;
    tc.record_trajectory = true;
    // Accuracy is compared to 1e-3 on a 500-point test set, so a single
    // flipped prediction fails; the default tolerance leaves ~2e-4 weight drift.
    tc.blind.solver.primal_tol = 1e-8;
    tc.blind.solver.dual_tol = 1e-8;
    const auto ideal = train(tc, inst.model, inst.devices, inst.test);
    tc.mode = AggregationMode::BlindFull;
    const auto blind = train(tc, inst.model, inst.devices, inst.test);
    if (ideal.rounds.size() != 20 || blind.rounds.size() != 20) {
        return {false, "training stopped early"};
    }
    double w_rel = 0.0;
    double loss_rel = 0.0;
    double acc_rel = 0.0;
    for (std::size_t r = 0; r < 20; ++r) {
        w_rel = std::max(w_rel, (blind.trajectory[r] - ideal.trajectory[r]).norm() / ideal.trajectory[r].norm());
        loss_rel = std::max(loss_rel, std::abs(blind.rounds[r].test_loss - ideal.rounds[r].test_loss) /
                                          std::abs(ideal.rounds[r].test_loss));
        acc_rel = std::max(acc_rel, std::abs(blind.rounds[r].accuracy - ideal.rounds[r].accuracy) /
                                        ideal.rounds[r].accuracy);
    }
    return {w_rel <= 1e-3 && loss_rel <= 1e-3 && acc_rel <= 1e-3,
            std::to_string(inst.model.w.size()) + " parameters, 20 rounds: max relative deviation of weights " +
                fmt("%.2e", w_rel) + ", test loss " + fmt("%.2e", loss_rel) + ", accuracy " + fmt("%.2e", acc_rel)};
}

// 9. Same seed, same bytes, for every experiment kind (thread counts differ).
Outcome determinism(const fs::path& out, int)
{
    std::vector<ExperimentConfig> configs;
    {
        auto c = base_config(ExperimentKind::NmseVsSnrL);
        c.sweep.lengths = {9, 17};
        c.sweep.snr_db = {4.0, 20.0};
        c.sweep.trials = 4;
        configs.push_back(c);
        c = base_config(ExperimentKind::NmseVsSnrK);
        c.sweep.lengths = {33};
        c.sweep.users = {2, 6};
        c.sweep.snr_db = {12.0};
        c.sweep.trials = 4;
        configs.push_back(c);
        c = base_config(ExperimentKind::LambdaCalibration);
        c.calibration.scale_grid = {0.5, 2.0};
        c.calibration.length = 17;
        c.calibration.trials = 4;
        configs.push_back(c);
        c = base_config(ExperimentKind::SolverOracleCheck);
        c.oracle.trials = 3;
        configs.push_back(c);
        c = base_config(ExperimentKind::FeelBenchmark);
        c.feel.blobs.dims = 8;
        c.feel.hidden = 8;
        c.feel.blobs.per_class = 20;
        c.feel.test_per_class = 10;
        c.feel.rounds = 3;
        c.feel.seeds = 2;
        for (auto& r : c.feel.runs) {
            r.length = r.length == 257 ? 33 : 17;
        }
        configs.push_back(c);
    }
    int compared = 0;
    std::string bad;
    for (const auto& c : configs) {
        const auto a = out / (to_string(c.kind) + "_a");
        const auto b = out / (to_string(c.kind) + "_b");
        run_experiment(c, {a, 1, false});
        run_experiment(c, {b, 2, false});
        for (const auto& entry : fs::directory_iterator(a)) {
            const auto name = entry.path().filename().string();
            if (entry.path().extension() != ".csv" || name == "timing.csv") {
                continue;
            }
            ++compared;
            if (slurp(entry.path()) != slurp(b / name)) {
                bad += " " + to_string(c.kind) + "/" + name;
            }
        }
    }
    return {bad.empty() && compared >= 6,
            std::to_string(compared) + " CSV files compared across repeated runs" +
                (bad.empty() ? ", all byte-identical" : "; differing:" + bad)};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    std::string out = "acceptance_out";
    int threads = 1;
    app.add_option("--criterion", only, "criterion number(s) to run (default: all)")->check(CLI::Range(1, 9));
    app.add_option("--out", out, "directory for intermediate tables");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "atom identities", 5, atom_identities},
        {2, "noiseless exact recovery", 300, noiseless_recovery},
        {3, "oracle equivalence", 600, oracle_equivalence},
        {4, "error scaling law", 1800, scaling_law},
        {5, "NMSE trend in SNR and L", 2700, snr_trend},
        {6, "NMSE trend in K", 2700, user_trend},
        {7, "FEEL desk-scale benchmark", 14400, feel_benchmark},
        {8, "noiseless blind training equals ideal", 1200, noiseless_training},
        {9, "determinism", 0, determinism},
    };
    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
            continue;
        }
        const auto dir = fs::path(out) / ("c" + std::to_string(c.id));
        fs::create_directories(dir);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(dir, threads);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.pass;
        std::string timing = fmt("%.1f s", secs);
        if (c.limit_seconds > 0) {
            timing += fmt(", limit %.0f s", c.limit_seconds);
            if (secs > c.limit_seconds) {
                pass = false;
                timing += ", over the runtime limit";
            }
        }
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
                  << " [" << timing << "]" << std::endl;
        failures += pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
