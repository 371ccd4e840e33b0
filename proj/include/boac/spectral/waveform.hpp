#ifndef BOAC_SPECTRAL_WAVEFORM_HPP
#define BOAC_SPECTRAL_WAVEFORM_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "boac/random.hpp"
#include "boac/spectral/atoms.hpp"
#include "boac/spectral/sample_grid.hpp"

namespace boac
{

/// Random band-limited waveform r(t) = sum_{l=-L-M}^{L+M} a_l sinc(tB - l),
/// a_l ~ N(0, 1/L) i.i.d.
struct WaveformSpec
{
    std::vector<double> coefficients; ///< a_l for l = -L-M .. L+M
    std::uint64_t seed = 0;

    static Index coefficient_count(const SampleGrid& grid)
    {
        return 2 * (grid.length() + grid.half_width()) + 1;
    }

    static WaveformSpec draw(std::uint64_t seed, const SampleGrid& grid)
    {
        WaveformSpec spec;
        spec.seed = seed;
        Rng rng(seed);
        const double sd = std::sqrt(1.0 / static_cast<double>(grid.length()));
        spec.coefficients.resize(static_cast<std::size_t>(coefficient_count(grid)));
        for (auto& a : spec.coefficients) {
            a = rng.normal(0.0, sd);
        }
        return spec;
    }
};

/// Matched-filter output samples g(l/B), l = -M..M, wrapped onto the L-sample
/// window.
///
/// With sinc interpolation the autocorrelation of r(t) at t = n/B is the
/// discrete autocorrelation c(n) = sum_l a_l a_{l-n} (up to 1/B, which is not
/// applied). Wrapping gives g(s) = sum_p c(s + pL), which equals the circular
/// autocorrelation of the coefficient sequence folded modulo L.
inline CVector matched_filter_samples(const WaveformSpec& spec, const SampleGrid& grid)
{
    const Index l = grid.length();
    const Index m = grid.half_width();
    const Index first = -(l + m);
    if (static_cast<Index>(spec.coefficients.size()) != WaveformSpec::coefficient_count(grid)) {
        throw DomainError("matched_filter_samples: coefficient count does not match grid");
    }
    RVector folded = RVector::Zero(l);
    for (std::size_t i = 0; i < spec.coefficients.size(); ++i) {
        const Index idx = first + static_cast<Index>(i);
        folded(((idx % l) + l) % l) += spec.coefficients[i];
    }
    // doubled(j) = folded(j mod L), so folded((i - s) mod L) = doubled(i + (-s mod L)).
    RVector doubled(2 * l);
    doubled << folded, folded;
    CVector g(l);
    for (Index s = -m; s <= m; ++s) {
        g(s + m) = folded.dot(doubled.segment((l - s) % l, l));
    }
    return g;
}

/// G = Diag(g) E with E(l, q) = e^{j 2 pi l q / L} on the symmetric grid.
///
/// E / sqrt(L) is unitary, so cond(G) = max|g| / min|g| and
/// G^{-1} y = E^H (y ./ g) / L. The dense matrix is only formed on request.
class WaveformMatrix
{
public:
    WaveformMatrix(CVector g_samples, const SampleGrid& grid, std::uint64_t seed = 0,
                   int redraws = 0)
        : g_(std::move(g_samples)), grid_(grid), seed_(seed), redraws_(redraws)
    {
        if (g_.size() != grid.length()) {
            throw DomainError("WaveformMatrix: g sample count does not match grid");
        }
        const double hi = g_.cwiseAbs().maxCoeff();
        const double lo = g_.cwiseAbs().minCoeff();
        condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    }

    const CVector& g_samples() const noexcept { return g_; }
    const SampleGrid& grid() const noexcept { return grid_; }
    double condition_number() const noexcept { return condition_; }
    std::uint64_t seed() const noexcept { return seed_; }
    int redraws() const noexcept { return redraws_; }

    CMatrix dense() const
    {
        const Index l = grid_.length();
        const Index m = grid_.half_width();
        CMatrix g(l, l);
        for (Index q = -m; q <= m; ++q) {
            for (Index row = -m; row <= m; ++row) {
                g(row + m, q + m) =
                    g_(row + m) * std::polar(1.0, kTwoPi * static_cast<double>(row * q) /
                                                      static_cast<double>(l));
            }
        }
        return g;
    }

    /// G x.
    CVector apply(const CVector& x) const
    {
        // E x = F^{-H} x evaluated at -l, i.e. the Fourier samples reversed.
        const CVector z = fourier_samples(x, grid_);
        const Index l = grid_.length();
        CVector y(l);
        for (Index i = 0; i < l; ++i) {
            y(i) = g_(i) * z(l - 1 - i);
        }
        return y;
    }

    /// G^{-1} y without forming G.
    CVector solve(const CVector& y) const
    {
        const Index l = grid_.length();
        CVector scaled(l);
        for (Index i = 0; i < l; ++i) {
            scaled(i) = y(i) / g_(i);
        }
        return fourier_samples(scaled, grid_) / static_cast<double>(l);
    }

private:
    CVector g_;
    SampleGrid grid_;
    double condition_ = 0.0;
    std::uint64_t seed_ = 0;
    int redraws_ = 0;
};

struct WaveformOptions
{
    double max_condition = 1e6;
    int max_redraws = 32;
};

/// Wraps injected g samples; fails if G is singular or too ill-conditioned.
inline WaveformMatrix waveform_from_samples(CVector g_samples, const SampleGrid& grid,
                                            double max_condition = 1e6)
{
    WaveformMatrix w(std::move(g_samples), grid);
    if (!(w.condition_number() <= max_condition)) {
        throw GenerationError("waveform_from_samples: condition number " +
                                  std::to_string(w.condition_number()) + " exceeds limit",
                              w.condition_number());
    }
    return w;
}

/// Draws waveforms from seed, seed+1, ... until cond(G) <= max_condition.
inline WaveformMatrix generate_waveform_matrix(std::uint64_t seed, const SampleGrid& grid,
                                               const WaveformOptions& options = {})
{
    if (!(options.max_condition > 1.0)) {
        throw DomainError("generate_waveform_matrix: max_condition must exceed 1");
    }
    double best = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= options.max_redraws; ++attempt) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
        const WaveformSpec spec = WaveformSpec::draw(s, grid);
        WaveformMatrix w(matched_filter_samples(spec, grid), grid, s, attempt);
        if (w.condition_number() <= options.max_condition) {
            return w;
        }
        best = std::min(best, w.condition_number());
    }
    throw GenerationError("generate_waveform_matrix: no well-conditioned waveform within " +
                              std::to_string(options.max_redraws) + " redraws",
                          best);
}

/// V = G^{-1} Y, checked against the residual ||G V - Y|| <= 1e-8 ||Y||.
inline CVector apply_inverse_waveform(const WaveformMatrix& g, const CVector& y,
                                      double max_condition = 1e6)
{
    if (!(g.condition_number() <= max_condition)) {
        throw NumericalError("apply_inverse_waveform: condition number " +
                             std::to_string(g.condition_number()) + " above threshold");
    }
    if (y.size() != g.grid().length()) {
        throw DomainError("apply_inverse_waveform: length mismatch");
    }
    CVector v = g.solve(y);
    const double residual = (g.apply(v) - y).norm();
    if (residual > 1e-8 * y.norm() + 1e-300) {
        throw NumericalError("apply_inverse_waveform: residual " + std::to_string(residual) +
                             " too large");
    }
    return v;
}

} // namespace boac

#endif
