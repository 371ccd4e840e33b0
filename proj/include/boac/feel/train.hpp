#ifndef BOAC_FEEL_TRAIN_HPP
#define BOAC_FEEL_TRAIN_HPP

#include <chrono>
#include <string>
#include <vector>

#include "boac/feel/aggregate.hpp"

namespace boac
{

struct TrainingConfig
{
    int rounds = 60;
    double learning_rate = 0.5;
    double gamma_margin = kDefaultGammaMargin;
    AggregationMode mode = AggregationMode::IdealSync;
    Index grid_length = 129;
    double snr_db = 5.0;
    /// 0 means the full local dataset every round.
    Index batch_size = 0;
    std::uint64_t seed = 0;
    FadingModel fading = FadingModel::UnitCircle;
    BlindOptions blind;
    TransmitOptions transmit;
    double divergence_loss = 1e6;
    int threads = 1;
    /// Keep the parameter vector after every round.
    bool record_trajectory = false;

    void validate() const
    {
        if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
            throw DomainError("TrainingConfig: learning rate must be finite and nonnegative");
        }
        if (rounds < 1) {
            throw DomainError("TrainingConfig: need at least one round");
        }
        if (gamma_margin < 0.0 || batch_size < 0) {
            throw DomainError("TrainingConfig: invalid gamma margin or batch size");
        }
        if (!(snr_db > -std::numeric_limits<double>::infinity())) {
            throw DomainError("TrainingConfig: SNR must be finite or +inf");
        }
        SampleGrid::with_length(grid_length);
    }
};

struct RoundLog
{
    int round = 0;
    AggregationMode mode = AggregationMode::IdealSync;
    /// ||estimate - ideal||^2 / ||ideal||^2 of the aggregated gradient.
    double nmse = 0.0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double accuracy = 0.0;
    double gamma = 0.0;
    double mean_lambda = 0.0;
    Index solver_failures = 0;
    double wall_ms = 0.0;
    std::string warning;
};

struct TrainingResult
{
    Evaluation initial;
    std::vector<RoundLog> rounds;
    std::vector<RVector> trajectory;
    ModelParams model;
    bool diverged = false;
};

namespace detail
{
inline constexpr std::uint64_t kChannelStream = 0x6368616e;
inline constexpr std::uint64_t kTransmitStream = 0x74786d74;
inline constexpr std::uint64_t kBatchStream = 0x62617463;
} // namespace detail

inline double aggregate_nmse(const RVector& estimate, const RVector& truth)
{
    const double denom = truth.squaredNorm();
    const double num = (estimate - truth).squaredNorm();
    if (denom == 0.0) {
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return num / denom;
}

/// Federated rounds: local gradients, uplink aggregation under the
/// configured mode, w <- w - eta * estimate, evaluation on `test`. The
/// downlink is exact. Channel, noise, waveform and batch draws depend only
/// on (seed, round, device), so modes run from the same seed see the same
/// channel realizations.
inline TrainingResult train(const TrainingConfig& cfg, ModelParams model,
                            const std::vector<LocalDataset>& devices, const Dataset& test)
{
    cfg.validate();
    model.validate();
    if (devices.empty()) {
        throw DomainError("train: no devices");
    }
    const int k = static_cast<int>(devices.size());
    const SampleGrid grid = SampleGrid::with_length(cfg.grid_length);
    const Index n = model.w.size();

    BlindOptions blind = cfg.blind;
    blind.mode = cfg.mode;
    blind.threads = cfg.threads;
    TransmitOptions transmit = cfg.transmit;
    transmit.threads = cfg.threads;

    TrainingResult res;
    res.initial = evaluate(model, test);
    double total_size = 0.0;
    for (const auto& d : devices) {
        total_size += static_cast<double>(d.size());
    }

    for (int m = 1; m <= cfg.rounds; ++m) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto round = static_cast<std::uint64_t>(m);
        RoundLog log;
        log.round = m;
        log.mode = cfg.mode;

        RMatrix grads(n, k);
        std::vector<double> losses(static_cast<std::size_t>(k));
        try {
            parallel_for(k, cfg.threads, [&](Index d) {
                const auto g = local_gradient(
                    model, devices[static_cast<std::size_t>(d)], cfg.batch_size,
                    derive_seed(cfg.seed, {detail::kBatchStream, round, static_cast<std::uint64_t>(d)}));
                grads.col(d) = g.gradient;
                losses[static_cast<std::size_t>(d)] = g.loss;
            });
        } catch (const GradientError& e) {
            res.diverged = true;
            log.warning = e.what();
            res.rounds.push_back(log);
            break;
        }
        for (int d = 0; d < k; ++d) {
            log.train_loss += losses[static_cast<std::size_t>(d)] *
                              static_cast<double>(devices[static_cast<std::size_t>(d)].size()) /
                              total_size;
        }

        const RVector ideal = aggregate_ideal(grads);
        RVector estimate;
        if (cfg.mode == AggregationMode::IdealSync) {
            estimate = ideal;
        } else {
            log.gamma = round_gamma(grads, cfg.gamma_margin);
            const auto ch = draw_channel(k, derive_seed(cfg.seed, {detail::kChannelStream, round}),
                                         cfg.fading);
            const auto pg = precode(grads, log.gamma, ch);
            const auto rm = transmit_round(pg, ch, grid, cfg.snr_db,
                                           derive_seed(cfg.seed, {detail::kTransmitStream, round}),
                                           transmit);
            if (cfg.mode == AggregationMode::NoRecovery) {
                estimate = aggregate_no_recovery(rm, log.gamma, k);
            } else {
                const AggregateResult agg = aggregate_blind(rm, k, log.gamma, blind);
                estimate = agg.estimate;
                log.mean_lambda = agg.diagnostics.mean_lambda;
                log.solver_failures = agg.diagnostics.failures;
                log.warning = agg.diagnostics.warning;
            }
        }
        log.nmse = aggregate_nmse(estimate, ideal);

        model.w -= cfg.learning_rate * estimate;
        if (cfg.record_trajectory) {
            res.trajectory.push_back(model.w);
        }
        bool finite = model.w.allFinite();
        if (finite) {
            const Evaluation e = evaluate(model, test);
            log.accuracy = e.accuracy;
            log.test_loss = e.loss;
            finite = std::isfinite(e.loss);
        }
        log.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        res.rounds.push_back(log);
        if (!finite || log.train_loss > cfg.divergence_loss || log.test_loss > cfg.divergence_loss) {
            res.diverged = true;
            res.rounds.back().warning = "training diverged";
            break;
        }
    }
    res.model = std::move(model);
    return res;
}

} // namespace boac

#endif
