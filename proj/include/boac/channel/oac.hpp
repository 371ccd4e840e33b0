#ifndef BOAC_CHANNEL_OAC_HPP
#define BOAC_CHANNEL_OAC_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "boac/parallel.hpp"
#include "boac/random.hpp"
#include "boac/solver/denoise.hpp"
#include "boac/solver/lambda.hpp"
#include "boac/spectral/atoms.hpp"
#include "boac/spectral/waveform.hpp"

namespace boac
{

enum class FadingModel
{
    UnitCircle,
    Rayleigh,
};

/// Per-round device states. Delays and gains apply to every gradient element.
struct ChannelRealization
{
    int k = 0;
    CVector h;
    std::vector<double> tau;
    /// Transmit power factors, |h_k|^{-2}.
    RVector p;
    std::uint64_t seed = 0;
};

/// Unit-modulus (default) or Rayleigh gains, delays uniform on [0, 1).
inline ChannelRealization draw_channel(int k, std::uint64_t seed,
                                       FadingModel fading = FadingModel::UnitCircle)
{
    if (k < 1) {
        throw DomainError("draw_channel: need at least one device");
    }
    Rng rng(seed);
    ChannelRealization ch;
    ch.k = k;
    ch.seed = seed;
    ch.h.resize(k);
    ch.p.resize(k);
    ch.tau.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        if (fading == FadingModel::UnitCircle) {
            ch.h(i) = std::polar(1.0, kTwoPi * rng.uniform());
        } else {
            Complex h;
            do {
                h = rng.complex_normal();
            } while (std::abs(h) == 0.0);
            ch.h(i) = h;
        }
        ch.tau[static_cast<std::size_t>(i)] = rng.uniform();
        ch.p(i) = 1.0 / std::norm(ch.h(i));
    }
    return ch;
}

/// Gradients shifted to be nonnegative, with the per-device precoding scalar
/// h_k^* / |h_k| sqrt(p_k).
struct PrecodedGradient
{
    /// N x K, entry (i, k) = Delta w_{i,k} + gamma.
    RMatrix shifted;
    double gamma = 0.0;
    CVector scale;

    Index elements() const noexcept { return shifted.rows(); }
    Index devices() const noexcept { return shifted.cols(); }
};

inline PrecodedGradient precode(const RMatrix& gradients, double gamma,
                                const ChannelRealization& ch)
{
    if (gradients.cols() != ch.k) {
        throw DomainError("precode: gradient columns must match the device count");
    }
    if (!std::isfinite(gamma)) {
        throw DomainError("precode: gamma must be finite");
    }
    PrecodedGradient pg;
    pg.gamma = gamma;
    pg.shifted = gradients.array() + gamma;
    for (Index k = 0; k < pg.shifted.cols(); ++k) {
        for (Index i = 0; i < pg.shifted.rows(); ++i) {
            if (!(pg.shifted(i, k) >= 0.0)) {
                throw PrecodeError("precode: shifted gradient (" + std::to_string(i) + ", " +
                                       std::to_string(k) + ") is negative",
                                   i, k);
            }
        }
    }
    pg.scale.resize(ch.k);
    for (int k = 0; k < ch.k; ++k) {
        pg.scale(k) = std::conj(ch.h(k)) / std::abs(ch.h(k)) * std::sqrt(ch.p(k));
    }
    return pg;
}

/// Channel times precoder for each device; 1 under full power inversion.
inline CVector composite_gain(const PrecodedGradient& pg, const ChannelRealization& ch)
{
    return ch.h.cwiseProduct(pg.scale);
}

struct NoiseDraw
{
    CVector z;
    /// ||Z|| / sqrt(L).
    double sigma = 0.0;
};

/// Circular Gaussian noise rescaled so that 20 log10(||signal|| / ||Z||) equals
/// the target exactly. An infinite target gives Z = 0.
inline NoiseDraw calibrate_noise(const CVector& signal, double target_snr_db, std::uint64_t seed)
{
    const Index l = signal.size();
    NoiseDraw out{CVector::Zero(l), 0.0};
    if (std::isinf(target_snr_db) && target_snr_db > 0.0) {
        return out;
    }
    if (std::isnan(target_snr_db) || std::isinf(target_snr_db)) {
        throw CalibrationError("calibrate_noise: SNR target must be finite or +inf");
    }
    const double norm = signal.norm();
    if (!(norm > 0.0)) {
        throw CalibrationError("calibrate_noise: zero signal has no finite SNR");
    }
    Rng rng(seed);
    for (Index i = 0; i < l; ++i) {
        out.z(i) = rng.complex_normal();
    }
    out.z *= norm / std::pow(10.0, target_snr_db / 20.0) / out.z.norm();
    out.sigma = out.z.norm() / std::sqrt(static_cast<double>(l));
    return out;
}

enum class NoiseMode
{
    /// Z added before the receiver inverts G, so G^{-1} Z is colored.
    Correlated,
    /// White noise added to V directly; SNR is 20 log10(||X|| / ||Z||).
    WhiteAfterInversion,
};

struct TransmitOptions
{
    NoiseMode noise = NoiseMode::Correlated;
    WaveformOptions waveform;
    int threads = 1;
};

/// One uplink round: V_i = G_i^{-1}(G_i X_i + Z_i) for every element i.
struct RoundMeasurement
{
    SampleGrid grid = SampleGrid::with_length(3);
    NoiseMode noise = NoiseMode::Correlated;
    double target_snr_db = std::numeric_limits<double>::infinity();
    /// N x L, row i is V_i.
    CMatrix v;
    /// N x L, row i is g_i(l / B) in storage order.
    RMatrix g_samples;
    std::vector<std::uint64_t> waveform_seeds;
    /// Per-element ||Z_i|| / sqrt(L) and realized SNR in dB.
    RVector sigma_z;
    RVector snr_db;

    Index elements() const noexcept { return v.rows(); }

    /// Mean of sigma_z over elements.
    double sigma() const { return sigma_z.size() == 0 ? 0.0 : sigma_z.mean(); }
};

namespace detail
{
inline constexpr std::uint64_t kWaveformStream = 0x77617665;
inline constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
} // namespace detail

inline RoundMeasurement transmit_round(const PrecodedGradient& pg, const ChannelRealization& ch,
                                       const SampleGrid& grid, double target_snr_db,
                                       std::uint64_t seed, const TransmitOptions& options = {})
{
    if (pg.devices() != ch.k || static_cast<int>(ch.tau.size()) != ch.k) {
        throw DomainError("transmit_round: device count mismatch");
    }
    const Index n = pg.elements();
    const Index l = grid.length();
    RoundMeasurement rm;
    rm.grid = grid;
    rm.noise = options.noise;
    rm.target_snr_db = target_snr_db;
    rm.v.resize(n, l);
    rm.g_samples.resize(n, l);
    rm.waveform_seeds.assign(static_cast<std::size_t>(n), 0);
    rm.sigma_z.resize(n);
    rm.snr_db.resize(n);

    const CMatrix atoms = atom_matrix(ch.tau, grid);
    const CVector gain = composite_gain(pg, ch);

    parallel_for(n, options.threads, [&](Index i) {
        CVector weights(ch.k);
        for (int k = 0; k < ch.k; ++k) {
            weights(k) = gain(k) * pg.shifted(i, k);
        }
        const CVector x = atoms * weights;
        const auto w = generate_waveform_matrix(
            derive_seed(seed, {detail::kWaveformStream, static_cast<std::uint64_t>(i)}), grid,
            options.waveform);
        const std::uint64_t noise_seed =
            derive_seed(seed, {detail::kNoiseStream, static_cast<std::uint64_t>(i)});
        CVector v;
        double signal_norm = 0.0;
        NoiseDraw noise;
        if (options.noise == NoiseMode::Correlated) {
            const CVector gx = w.apply(x);
            signal_norm = gx.norm();
            noise = calibrate_noise(gx, target_snr_db, noise_seed);
            v = apply_inverse_waveform(w, gx + noise.z, options.waveform.max_condition);
        } else {
            signal_norm = x.norm();
            noise = calibrate_noise(x, target_snr_db, noise_seed);
            v = x + noise.z;
        }
        rm.v.row(i) = v.transpose();
        rm.g_samples.row(i) = w.g_samples().real().transpose();
        rm.waveform_seeds[static_cast<std::size_t>(i)] = w.seed();
        rm.sigma_z(i) = noise.sigma;
        const double zn = noise.z.norm();
        rm.snr_db(i) = zn > 0.0 ? 20.0 * std::log10(signal_norm / zn)
                                : std::numeric_limits<double>::infinity();
    });
    return rm;
}

enum class FitWeighting
{
    /// Weights |g_{-r}|^2 / mean |g|^2 undo the coloring of G^{-1} Z.
    Whitened,
    /// Plain ||X - V||^2.
    Unweighted,
};

/// Fourier-domain fit weights for element i (unit weights for white noise).
inline RVector fit_weights(const RoundMeasurement& rm, Index i, FitWeighting weighting)
{
    const Index l = rm.grid.length();
    if (weighting == FitWeighting::Unweighted || rm.noise == NoiseMode::WhiteAfterInversion) {
        return RVector::Ones(l);
    }
    // Fourier sample r of G^{-1} Z is Z_{-r} / g_{-r}.
    RVector w(l);
    for (Index r = 0; r < l; ++r) {
        const double g = rm.g_samples(i, l - 1 - r);
        w(r) = g * g;
    }
    return w / w.mean();
}

/// Per-entry noise standard deviation on the (weighted) Fourier samples of V_i.
inline double fourier_noise_sigma(const RoundMeasurement& rm, Index i, FitWeighting weighting)
{
    const double sz = rm.sigma_z(i);
    const Index l = rm.grid.length();
    if (rm.noise == NoiseMode::WhiteAfterInversion) {
        return sz * std::sqrt(static_cast<double>(l));
    }
    const RVector g2 = rm.g_samples.row(i).array().square();
    if (weighting == FitWeighting::Whitened) {
        return sz / std::sqrt(g2.mean());
    }
    return sz * std::sqrt(g2.cwiseInverse().mean());
}

struct LambdaPolicy
{
    double scale_c = kDefaultLambdaScale;
    double lambda_max = kDefaultLambdaMax;
    FitWeighting weighting = FitWeighting::Whitened;
};

/// Denoising problem for element i with lambda from the noise-scaled rule.
inline DenoiseProblem make_denoise_problem(const RoundMeasurement& rm, Index i,
                                           const LambdaPolicy& policy = {})
{
    const double sigma = fourier_noise_sigma(rm, i, policy.weighting);
    const double lambda = measurement_lambda(sigma, rm.grid, policy.scale_c, policy.lambda_max);
    return DenoiseProblem(rm.v.row(i).transpose(), lambda, rm.grid,
                          fit_weights(rm, i, policy.weighting));
}

} // namespace boac

#endif
