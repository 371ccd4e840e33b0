#ifndef BOAC_FEEL_AGGREGATE_HPP
#define BOAC_FEEL_AGGREGATE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "boac/channel/oac.hpp"
#include "boac/feel/data.hpp"
#include "boac/numeric/nnqp.hpp"
#include "boac/solver/recovery.hpp"

namespace boac
{

/// Average cross-entropy gradient over a device's data. With batch_size > 0
/// and smaller than the local set, a batch is drawn without replacement
/// from `seed`; otherwise the full local set is used.
inline LossGradient local_gradient(const ModelParams& model, const LocalDataset& local,
                                   Index batch_size = 0, std::uint64_t seed = 0)
{
    if (local.size() == 0) {
        throw DomainError("local_gradient: empty local dataset");
    }
    if (batch_size <= 0 || batch_size >= local.size()) {
        return loss_and_gradient(model, local.data);
    }
    std::vector<Index> rows(static_cast<std::size_t>(local.size()));
    std::iota(rows.begin(), rows.end(), Index{0});
    Rng rng(seed);
    for (Index i = 0; i < batch_size; ++i) {
        const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(local.size() - i)));
        std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
    }
    rows.resize(static_cast<std::size_t>(batch_size));
    std::sort(rows.begin(), rows.end());
    return loss_and_gradient(model, local.data.subset(rows));
}

enum class AggregationMode
{
    IdealSync,
    BlindFull,
    BlindDelayReuse,
    NoRecovery,
};

inline std::string to_string(AggregationMode m)
{
    switch (m) {
    case AggregationMode::IdealSync:
        return "ideal_sync";
    case AggregationMode::BlindFull:
        return "blind_full";
    case AggregationMode::BlindDelayReuse:
        return "blind_delay_reuse";
    case AggregationMode::NoRecovery:
        return "no_recovery";
    }
    return "unknown";
}

inline AggregationMode parse_aggregation_mode(const std::string& s)
{
    for (auto m : {AggregationMode::IdealSync, AggregationMode::BlindFull,
                   AggregationMode::BlindDelayReuse, AggregationMode::NoRecovery}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw DomainError("unknown aggregation mode '" + s + "'");
}

inline constexpr double kDefaultGammaMargin = 0.1;

/// Shared positivity shift for one round: max(0, -min entry) + margin.
inline double round_gamma(const RMatrix& gradients, double margin = kDefaultGammaMargin)
{
    if (gradients.size() == 0) {
        throw DomainError("round_gamma: no gradients");
    }
    return std::max(0.0, -gradients.minCoeff()) + margin;
}

/// Column mean of the N x K gradient matrix.
inline RVector aggregate_ideal(const RMatrix& gradients)
{
    if (gradients.cols() < 1) {
        throw DomainError("aggregate_ideal: need at least one device");
    }
    return gradients.rowwise().mean();
}

/// Zero-delay read-off: the receiver assumes every tau_k = 0, so the
/// amplitude sum would sit alone at the centre sample of V_i. The estimate
/// is Re([V_i]_0) / K - gamma.
inline RVector aggregate_no_recovery(const RoundMeasurement& rm, double gamma, int k)
{
    if (k < 1) {
        throw DomainError("aggregate_no_recovery: K must be positive");
    }
    const Index centre = rm.grid.half_width();
    RVector out(rm.elements());
    for (Index i = 0; i < rm.elements(); ++i) {
        out(i) = rm.v(i, centre).real() / static_cast<double>(k) - gamma;
    }
    return out;
}

/// How delay-reuse mode turns the subset solutions into K delays.
enum class DelayPooling
{
    /// Fixed-order rotational invariance on the mean Toeplitz generator.
    AveragedToeplitz,
    /// Circular clustering of the per-element recovered supports.
    SupportClustering,
};

struct BlindOptions
{
    AggregationMode mode = AggregationMode::BlindFull;
    DelayPooling pooling = DelayPooling::AveragedToeplitz;
    /// Elements solved by the SDP in delay-reuse mode.
    Index reuse_subset = 8;
    /// Support atoms lighter than this fraction of their element's heaviest
    /// atom are dropped before clustering.
    double prune_fraction = 0.05;
    int lloyd_iterations = 20;
    SolverConfig solver;
    LambdaPolicy lambda;
    double rank_tol = kDefaultRankTol;
    int threads = 1;
};

struct AggregationDiagnostics
{
    Index elements = 0;
    Index sdp_solves = 0;
    /// Elements whose solve did not converge or threw.
    Index failures = 0;
    double mean_lambda = 0.0;
    double mean_iterations = 0.0;
    double max_primal_residual = 0.0;
    /// Delay estimates used for the least-squares elements (delay reuse).
    std::vector<double> delays;
    std::string warning;
};

struct AggregateResult
{
    RVector estimate;
    AggregationDiagnostics diagnostics;
};

struct WeightedDelay
{
    double tau = 0.0;
    double weight = 0.0;
};

namespace detail
{

inline double weighted_circular_mean(const std::vector<WeightedDelay>& pts,
                                     const std::vector<int>& label, int cluster)
{
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (label[i] == cluster) {
            acc += pts[i].weight * std::polar(1.0, kTwoPi * pts[i].tau);
        }
    }
    return wrap_delay(std::arg(acc) / kTwoPi);
}

/// Evenly spread subset of [0, n) of the given size (all of it if n <= size).
inline std::vector<Index> spread_subset(Index n, Index size)
{
    std::vector<Index> idx;
    if (n <= size) {
        idx.resize(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), Index{0});
        return idx;
    }
    for (Index j = 0; j < size; ++j) {
        idx.push_back(((2 * j + 1) * n) / (2 * size));
    }
    return idx;
}

} // namespace detail

/// At most k delay clusters on the unit circle. Points are cut at the
/// largest circular gaps, then refined by weighted Lloyd iterations.
inline std::vector<double> cluster_delays(std::vector<WeightedDelay> pts, int k,
                                          int lloyd_iterations = 20)
{
    if (k < 1) {
        throw DomainError("cluster_delays: K must be positive");
    }
    std::erase_if(pts, [](const WeightedDelay& p) { return !(p.weight > 0.0); });
    if (pts.empty()) {
        return {};
    }
    std::sort(pts.begin(), pts.end(),
              [](const WeightedDelay& a, const WeightedDelay& b) { return a.tau < b.tau; });
    const std::size_t n = pts.size();
    // gap[i] separates point i from point i + 1 (cyclically).
    std::vector<double> gap(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double next = i + 1 < n ? pts[i + 1].tau : pts[0].tau + 1.0;
        gap[i] = next - pts[i].tau;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return gap[a] > gap[b]; });
    std::size_t clusters = std::min<std::size_t>(static_cast<std::size_t>(k), n);
    while (clusters > 1 && gap[order[clusters - 1]] <= kDelayMergeTol) {
        --clusters;
    }
    std::vector<char> cut(n, 0);
    for (std::size_t c = 0; c < clusters; ++c) {
        cut[order[c]] = 1;
    }
    // Walk from just after the first cut so each arc gets one label.
    const std::size_t start = (order[0] + 1) % n;
    std::vector<int> label(n, 0);
    int current = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = (start + s) % n;
        label[i] = current;
        if (cut[i]) {
            ++current;
        }
    }
    std::vector<double> centres;
    for (int c = 0; c < static_cast<int>(clusters); ++c) {
        centres.push_back(detail::weighted_circular_mean(pts, label, c));
    }
    for (int it = 0; it < lloyd_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            for (int c = 1; c < static_cast<int>(centres.size()); ++c) {
                if (circular_distance(pts[i].tau, centres[static_cast<std::size_t>(c)]) <
                    circular_distance(pts[i].tau, centres[static_cast<std::size_t>(best)])) {
                    best = c;
                }
            }
            label[i] = best;
        }
        // Empty clusters are dropped.
        std::vector<double> next;
        std::vector<int> remap(centres.size(), -1);
        for (int c = 0; c < static_cast<int>(centres.size()); ++c) {
            if (std::count(label.begin(), label.end(), c) > 0) {
                remap[static_cast<std::size_t>(c)] = static_cast<int>(next.size());
                next.push_back(0.0);
            }
        }
        for (auto& lb : label) {
            lb = remap[static_cast<std::size_t>(lb)];
        }
        for (int c = 0; c < static_cast<int>(next.size()); ++c) {
            next[static_cast<std::size_t>(c)] = detail::weighted_circular_mean(pts, label, c);
        }
        const bool same = next == centres;
        centres = std::move(next);
        if (same) {
            break;
        }
    }
    std::sort(centres.begin(), centres.end());
    return centres;
}

/// Nonnegative amplitudes of fixed atoms a(tau_k) fitted to V_i in the
/// (weighted) Fourier domain.
inline RVector fixed_delay_amplitudes(const CVector& v, const SampleGrid& grid,
                                      const std::vector<double>& delays, const RVector& weights)
{
    const Index l = grid.length();
    const Index c = static_cast<Index>(delays.size());
    CMatrix h(l, c);
    for (Index k = 0; k < c; ++k) {
        h.col(k) = harmonic_vector(delays[static_cast<std::size_t>(k)], grid);
    }
    const RVector sw = weights.cwiseSqrt();
    const CMatrix a = sw.asDiagonal() * h;
    const CVector b = sw.asDiagonal() * fourier_samples(v, grid);
    return solve_nnls(a, b).x;
}

/// Blind mean estimate per element from one round's measurement.
///
/// BlindFull solves the denoising SDP for every element. BlindDelayReuse
/// solves it on an evenly spread subset, pools the recovered supports into
/// at most K delay estimates and fits the remaining elements by nonnegative
/// least squares on those fixed atoms. Elements whose solve throws fall back
/// to the zero-delay read-off and count as failures together with
/// non-converged solves; more than 10% failures sets a warning and failure
/// of every solve throws SolverError.
inline AggregateResult aggregate_blind(const RoundMeasurement& rm, int k, double gamma,
                                       const BlindOptions& opt = {})
{
    if (k < 1) {
        throw DomainError("aggregate_blind: K must be positive");
    }
    if (opt.mode != AggregationMode::BlindFull && opt.mode != AggregationMode::BlindDelayReuse) {
        throw DomainError("aggregate_blind: mode must be blind_full or blind_delay_reuse");
    }
    const Index n = rm.elements();
    AggregateResult out;
    out.estimate = RVector::Zero(n);
    auto& diag = out.diagnostics;
    diag.elements = n;
    if (n == 0) {
        return out;
    }

    const RVector fallback = aggregate_no_recovery(rm, gamma, k);
    double lambda_sum = 0.0;
    double iteration_sum = 0.0;

    CVector generator_sum = CVector::Zero(rm.grid.length());
    Index generator_count = 0;

    // SDP solves for the listed elements; returns their recovered supports
    // and accumulates their Toeplitz generators.
    auto solve = [&](const std::vector<Index>& idx) {
        const std::size_t s = idx.size();
        std::vector<RecoveryResult> rec(s);
        std::vector<double> lambdas(s, 0.0);
        std::vector<char> failed(s, 0);
        std::vector<CVector> generators(s);
        parallel_for(static_cast<Index>(s), opt.threads, [&](Index j) {
            const auto js = static_cast<std::size_t>(j);
            const Index i = idx[js];
            try {
                const DenoiseProblem problem = make_denoise_problem(rm, i, opt.lambda);
                lambdas[js] = problem.lambda();
                const DenoiseSolution sol = atomic_denoise(problem, opt.solver);
                generators[js] = sol.u.coefficients();
                rec[js] = recover_mean(sol, k, gamma, opt.rank_tol);
                failed[js] = rec[js].diagnostics.converged ? 0 : 1;
            } catch (const std::exception& e) {
                failed[js] = 2;
                rec[js] = RecoveryResult{};
                rec[js].mean_estimate = fallback(i);
                rec[js].diagnostics.warning = e.what();
            }
        });
        std::vector<WeightedDelay> pool;
        for (std::size_t j = 0; j < s; ++j) {
            out.estimate(idx[j]) = rec[j].mean_estimate;
            diag.failures += failed[j] ? 1 : 0;
            lambda_sum += lambdas[j];
            iteration_sum += rec[j].diagnostics.iterations;
            diag.max_primal_residual =
                std::max(diag.max_primal_residual, rec[j].diagnostics.primal_residual);
            if (failed[j] != 2) {
                generator_sum += generators[j];
                ++generator_count;
            }
            double heaviest = 0.0;
            for (const auto& c : rec[j].support) {
                heaviest = std::max(heaviest, c.amplitude);
            }
            for (const auto& c : rec[j].support) {
                if (failed[j] != 2 && c.amplitude >= opt.prune_fraction * heaviest) {
                    pool.push_back({c.tau, c.amplitude});
                }
            }
        }
        diag.sdp_solves += static_cast<Index>(s);
        return pool;
    };

    const Index subset = opt.mode == AggregationMode::BlindFull
                             ? n
                             : std::max<Index>(1, opt.reuse_subset);
    const std::vector<Index> solved = detail::spread_subset(n, subset);
    std::vector<WeightedDelay> pool = solve(solved);

    if (static_cast<Index>(solved.size()) < n) {
        std::vector<char> is_solved(static_cast<std::size_t>(n), 0);
        for (Index i : solved) {
            is_solved[static_cast<std::size_t>(i)] = 1;
        }
        std::vector<Index> rest;
        for (Index i = 0; i < n; ++i) {
            if (!is_solved[static_cast<std::size_t>(i)]) {
                rest.push_back(i);
            }
        }
        if (opt.pooling == DelayPooling::SupportClustering) {
            diag.delays = cluster_delays(std::move(pool), k, opt.lloyd_iterations);
        } else if (generator_count > 0 && generator_sum(0).real() > 0.0 &&
                   k < rm.grid.length()) {
            try {
                diag.delays =
                    fixed_order_delays(ToeplitzGenerator(generator_sum / static_cast<double>(generator_count)), k);
            } catch (const DecompositionError&) {
                diag.delays.clear();
            }
        }
        if (diag.delays.empty()) {
            // Nothing to reuse (e.g. an all-zero subset); solve the rest too.
            solve(rest);
        } else {
            parallel_for(static_cast<Index>(rest.size()), opt.threads, [&](Index r) {
                const Index i = rest[static_cast<std::size_t>(r)];
                const RVector beta =
                    fixed_delay_amplitudes(rm.v.row(i).transpose(), rm.grid, diag.delays,
                                           fit_weights(rm, i, opt.lambda.weighting));
                out.estimate(i) = beta.sum() / static_cast<double>(k) - gamma;
            });
        }
    }

    diag.mean_lambda = lambda_sum / static_cast<double>(diag.sdp_solves);
    diag.mean_iterations = iteration_sum / static_cast<double>(diag.sdp_solves);
    if (diag.failures == diag.sdp_solves) {
        throw SolverError("aggregate_blind: every denoising solve failed");
    }
    if (10 * diag.failures > diag.sdp_solves) {
        diag.warning = std::to_string(diag.failures) + " of " + std::to_string(diag.sdp_solves) +
                       " denoising solves failed or did not converge";
    }
    return out;
}

} // namespace boac

#endif
