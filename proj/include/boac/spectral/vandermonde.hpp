#ifndef BOAC_SPECTRAL_VANDERMONDE_HPP
#define BOAC_SPECTRAL_VANDERMONDE_HPP

#include <algorithm>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "boac/numeric/nnqp.hpp"
#include "boac/spectral/atoms.hpp"
#include "boac/spectral/toeplitz.hpp"

namespace boac
{

struct VandermondeDecomposition
{
    /// Sorted by tau; near-coincident delays merged.
    std::vector<SpectralComponent> components;
    Index rank = 0;
    /// ||Toep(u) - sum_k c_k v(tau_k) v(tau_k)^H||_F / ||Toep(u)||_F.
    double relative_residual = 0.0;
};

inline constexpr double kDefaultRankTol = 1e-6;
inline constexpr double kDelayMergeTol = 1e-9;

/// Merge components whose delays are within `tol` on the circle, then sort.
inline std::vector<SpectralComponent> merge_components(std::vector<SpectralComponent> comps,
                                                       double tol = kDelayMergeTol)
{
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.tau < b.tau; });
    std::vector<SpectralComponent> out;
    for (const auto& c : comps) {
        if (!out.empty() && circular_distance(out.back().tau, c.tau) <= tol) {
            out.back().amplitude += c.amplitude;
        } else {
            out.push_back(c);
        }
    }
    if (out.size() > 1 && circular_distance(out.front().tau, out.back().tau) <= tol) {
        out.front().amplitude += out.back().amplitude;
        out.pop_back();
    }
    return out;
}

/// Column (e^{-j 2 pi tau r})_{r=0..n-1}; Toeplitz outer products v v^H have
/// generator entries e^{j 2 pi tau d} whatever the index offset, so this is
/// interchangeable with harmonic_vector inside a Toeplitz matrix.
inline CVector toeplitz_vector(double tau, Index n)
{
    CVector v(n);
    for (Index r = 0; r < n; ++r) {
        v(r) = std::polar(1.0, -kTwoPi * tau * static_cast<double>(r));
    }
    return v;
}

namespace detail
{

/// Delays from the shift invariance of a signal subspace spanned by
/// harmonic vectors: the basis restricted to rows 1.. equals the basis on
/// rows ..n-2 times a matrix with eigenvalues e^{-j 2 pi tau_k}.
inline std::vector<double> rotation_delays(const CMatrix& signal)
{
    const Index l = signal.rows();
    const CMatrix upper = signal.topRows(l - 1);
    const CMatrix lower = signal.bottomRows(l - 1);
    const CMatrix rotation = upper.colPivHouseholderQr().solve(lower);
    Eigen::ComplexEigenSolver<CMatrix> ces(rotation, false);
    if (ces.info() != Eigen::Success) {
        throw DecompositionError("rotation eigenproblem failed");
    }
    std::vector<double> taus;
    for (Index k = 0; k < signal.cols(); ++k) {
        taus.push_back(wrap_delay(-std::arg(ces.eigenvalues()(k)) / kTwoPi));
    }
    return taus;
}

} // namespace detail

/// The `order` delays whose harmonic vectors best span the dominant
/// eigenspace of Toep(u), for when the model order is known and the
/// generator carries noise (so its numerical rank is not meaningful).
inline std::vector<double> fixed_order_delays(const ToeplitzGenerator& u, Index order)
{
    const Index l = u.size();
    if (order < 1 || order >= l) {
        throw DomainError("fixed_order_delays: need 1 <= order < generator length");
    }
    const CMatrix t = u.matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (t + t.adjoint()));
    if (es.info() != Eigen::Success) {
        throw DecompositionError("fixed_order_delays: eigendecomposition failed");
    }
    std::vector<double> taus = detail::rotation_delays(es.eigenvectors().rightCols(order));
    std::sort(taus.begin(), taus.end());
    return taus;
}

/// Toep(u) = sum_k c_k v(tau_k) v(tau_k)^H with v the harmonic vector
/// (entries e^{-j 2 pi tau r}), recovered by rotational invariance of the
/// dominant eigenspace followed by a nonnegative amplitude fit.
///
/// Rank is the number of eigenvalues above rank_tol * lambda_max. Any
/// generator length n >= 2 is accepted.
inline VandermondeDecomposition vandermonde_decompose(const ToeplitzGenerator& u,
                                                      double rank_tol = kDefaultRankTol)
{
    const CMatrix t = u.matrix();
    const Index l = t.rows();
    if (l < 2) {
        throw DomainError("vandermonde_decompose: generator too short");
    }
    VandermondeDecomposition out;

    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (t + t.adjoint()));
    if (es.info() != Eigen::Success) {
        throw DecompositionError("vandermonde_decompose: eigendecomposition failed");
    }
    const RVector& ev = es.eigenvalues();
    const double top = ev(l - 1);
    if (!(top > 0.0)) {
        if (ev(0) < -1e-300) {
            throw DecompositionError("vandermonde_decompose: Toeplitz matrix is negative");
        }
        return out;
    }
    if (ev(0) < -10.0 * rank_tol * top) {
        throw DecompositionError("vandermonde_decompose: Toeplitz matrix is indefinite");
    }
    Index rank = 0;
    for (Index i = 0; i < l; ++i) {
        if (ev(i) > rank_tol * top) {
            ++rank;
        }
    }
    if (rank >= l) {
        throw FullRankError("vandermonde_decompose: Toeplitz matrix has full rank");
    }
    out.rank = rank;

    const std::vector<double> taus = detail::rotation_delays(es.eigenvectors().rightCols(rank));

    CMatrix v(l, rank);
    for (Index k = 0; k < rank; ++k) {
        v.col(k) = toeplitz_vector(taus[static_cast<std::size_t>(k)], l);
    }
    const CMatrix gram = v.adjoint() * v;
    RMatrix q = gram.cwiseAbs2();
    RVector c(rank);
    for (Index k = 0; k < rank; ++k) {
        c(k) = -(v.col(k).adjoint() * t * v.col(k))(0, 0).real();
    }
    const RVector amp = solve_nnqp(q, c).x;

    std::vector<SpectralComponent> comps;
    for (Index k = 0; k < rank; ++k) {
        if (amp(k) > 0.0) {
            comps.push_back({taus[static_cast<std::size_t>(k)], amp(k)});
        }
    }
    out.components = merge_components(std::move(comps));

    CMatrix recon = CMatrix::Zero(l, l);
    for (const auto& comp : out.components) {
        const CVector h = toeplitz_vector(comp.tau, l);
        recon += comp.amplitude * h * h.adjoint();
    }
    out.relative_residual = (t - recon).norm() / t.norm();
    return out;
}

/// Length-n generator of sum_k c_k v(tau_k) v(tau_k)^H.
inline ToeplitzGenerator toeplitz_from_components(std::span<const SpectralComponent> comps,
                                                  Index n)
{
    // Entry (r, r + d) of v v^H is e^{j 2 pi tau d}.
    CVector u = CVector::Zero(n);
    for (const auto& c : comps) {
        for (Index d = 0; d < n; ++d) {
            u(d) += c.amplitude * std::polar(1.0, kTwoPi * c.tau * static_cast<double>(d));
        }
    }
    return ToeplitzGenerator(std::move(u));
}

inline ToeplitzGenerator toeplitz_from_components(std::span<const SpectralComponent> comps,
                                                  const SampleGrid& grid)
{
    return toeplitz_from_components(comps, grid.length());
}

} // namespace boac

#endif
