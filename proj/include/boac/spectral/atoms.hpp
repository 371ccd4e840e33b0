#ifndef BOAC_SPECTRAL_ATOMS_HPP
#define BOAC_SPECTRAL_ATOMS_HPP

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "boac/spectral/sample_grid.hpp"
#include "boac/types.hpp"

namespace boac
{

/// One delayed component of a mixture: delay in [0,1) and its weight.
struct SpectralComponent
{
    double tau = 0.0;
    double amplitude = 0.0;
};

struct Atom
{
    double tau = 0.0;
    CVector values;
};

struct SpectralMixture
{
    CVector values;
    std::optional<std::vector<SpectralComponent>> ground_truth;
};

namespace detail
{

inline void require_delay(double tau, const char* who)
{
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw DomainError(std::string(who) + ": delay must lie in [0, 1)");
    }
}

/// sin(pi L x) / (L sin(pi x)), the normalized Dirichlet kernel (odd L).
inline double dirichlet_kernel(double x, Index length)
{
    // 1-periodic for odd L; fold into [-1/2, 1/2) first.
    x -= std::floor(x + 0.5);
    if (x == 0.0) {
        return 1.0;
    }
    const double l = static_cast<double>(length);
    return std::sin(kPi * l * x) / (l * std::sin(kPi * x));
}

/// Symmetric-grid DFT matrix, entry (r, q) = e^{sign * j 2 pi r q / L}.
/// Matrices are built once per (L, sign) and shared between threads.
inline const CMatrix& dft_matrix(Index length, int sign)
{
    static std::mutex mutex;
    static std::map<std::pair<Index, int>, std::unique_ptr<const CMatrix>> cache;
    const std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{length, sign}];
    if (!slot) {
        CVector w(length);
        for (Index k = 0; k < length; ++k) {
            w(k) = std::polar(1.0, static_cast<double>(sign) * kTwoPi * static_cast<double>(k) /
                                       static_cast<double>(length));
        }
        const Index m = length / 2;
        auto f = std::make_unique<CMatrix>(length, length);
        for (Index q = -m; q <= m; ++q) {
            for (Index r = -m; r <= m; ++r) {
                (*f)(r + m, q + m) = w(((r * q) % length + length) % length);
            }
        }
        slot = std::move(f);
    }
    return *slot;
}

} // namespace detail

/// Sampled Dirichlet atom a(tau), [a]_q = (1/L) sum_r e^{j 2 pi (q - L tau) r / L}.
///
/// The symmetric sum makes every entry real; the closed form
/// sin(pi L x) / (L sin(pi x)) with x = q/L - tau is used.
inline Atom dirichlet_atom(double tau, const SampleGrid& grid)
{
    detail::require_delay(tau, "dirichlet_atom");
    const Index l = grid.length();
    const Index m = grid.half_width();
    Atom atom{tau, CVector(l)};
    for (Index q = -m; q <= m; ++q) {
        const double x = static_cast<double>(q) / static_cast<double>(l) - tau;
        atom.values(q + m) = detail::dirichlet_kernel(x, l);
    }
    return atom;
}

/// Columns are a(tau_k).
inline CMatrix atom_matrix(std::span<const double> taus, const SampleGrid& grid)
{
    CMatrix a(grid.length(), static_cast<Index>(taus.size()));
    for (std::size_t k = 0; k < taus.size(); ++k) {
        a.col(static_cast<Index>(k)) = dirichlet_atom(taus[k], grid).values;
    }
    return a;
}

/// X = sum_k amplitude_k a(tau_k), with the components kept as ground truth.
inline SpectralMixture synthesize_mixture(std::span<const SpectralComponent> components,
                                          const SampleGrid& grid)
{
    SpectralMixture mix{CVector::Zero(grid.length()), std::vector<SpectralComponent>{}};
    for (const auto& c : components) {
        detail::require_delay(c.tau, "synthesize_mixture");
        if (!(c.amplitude >= 0.0)) {
            throw DomainError("synthesize_mixture: amplitudes must be nonnegative");
        }
        mix.values += c.amplitude * dirichlet_atom(c.tau, grid).values;
        mix.ground_truth->push_back(c);
    }
    return mix;
}

/// Fourier samples F^{-H} X: z_r = sum_q e^{-j 2 pi r q / L} X_q.
///
/// Maps a(tau) to the harmonic vector with entries e^{-j 2 pi tau r}; the
/// entry at r = 0 is the plain sum of X.
inline CVector fourier_samples(const CVector& x, const SampleGrid& grid)
{
    const Index l = grid.length();
    if (x.size() != l) {
        throw DomainError("fourier_samples: length mismatch");
    }
    return detail::dft_matrix(l, -1) * x;
}

/// Inverse of fourier_samples: X_q = (1/L) sum_r e^{j 2 pi q r / L} z_r.
inline CVector from_fourier_samples(const CVector& z, const SampleGrid& grid)
{
    const Index l = grid.length();
    if (z.size() != l) {
        throw DomainError("from_fourier_samples: length mismatch");
    }
    return detail::dft_matrix(l, 1) * z / static_cast<double>(l);
}

/// Harmonic vector v(tau) = F^{-H} a(tau), entries e^{-j 2 pi tau r}.
inline CVector harmonic_vector(double tau, const SampleGrid& grid)
{
    const Index m = grid.half_width();
    CVector v(grid.length());
    for (Index r = -m; r <= m; ++r) {
        v(r + m) = std::polar(1.0, -kTwoPi * tau * static_cast<double>(r));
    }
    return v;
}

inline double wrap_delay(double tau)
{
    double w = tau - std::floor(tau);
    return w >= 1.0 ? 0.0 : w;
}

/// Distance between two delays on the unit circle.
inline double circular_distance(double a, double b)
{
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

} // namespace boac

#endif
