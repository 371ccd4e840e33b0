#ifndef BOAC_NUMERIC_HERMITIAN_HPP
#define BOAC_NUMERIC_HERMITIAN_HPP

#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "boac/types.hpp"

namespace boac
{

namespace detail
{
/// Number of positive entries of an ascending eigenvalue list.
inline Index positive_count(const RVector& ascending)
{
    Index k = 0;
    while (k < ascending.size() && ascending(ascending.size() - 1 - k) > 0.0) {
        ++k;
    }
    return k;
}
} // namespace detail

/// Projection of Hermitian matrices onto the PSD cone.
///
/// Full divide-and-conquer eigendecomposition (LAPACK zheevd), keeping the
/// pairs with positive eigenvalue. On the sizes used here it beats the
/// value-range driver, whose bisection dominates at moderate rank.
/// Buffers are kept between calls.
class PsdProjector
{
public:
    explicit PsdProjector(Index n = 0) { resize(n); }

    void resize(Index n)
    {
        n_ = n;
        work_.resize(n, n);
        values_.resize(n);
    }

    /// Writes the PSD part of `m` (Hermitian, lower triangle used) into `out`.
    /// Returns the number of positive eigenvalues kept.
    Index project(const CMatrix& m, CMatrix& out)
    {
        if (m.rows() != n_) {
            resize(m.rows());
        }
        work_ = m;
        const lapack_int info =
            LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n_),
                           reinterpret_cast<lapack_complex_double*>(work_.data()),
                           static_cast<lapack_int>(n_), values_.data());
        if (info != 0) {
            throw NumericalError("PsdProjector: zheevd failed with info " +
                                 std::to_string(info));
        }
        const Index found = detail::positive_count(values_);
        if (found == 0) {
            out.setZero(n_, n_);
            return 0;
        }
        const auto v = work_.rightCols(found);
        const RVector lam = values_.tail(found);
        out.noalias() = v * lam.asDiagonal() * v.adjoint();
        return found;
    }

private:
    Index n_ = 0;
    CMatrix work_;
    RVector values_;
};

/// PSD projection for centrohermitian matrices (J conj(A) J = A), such as
/// Hermitian Toeplitz matrices.
///
/// With the sparse unitary Q whose columns are (e_j + e_{n-1-j}) / sqrt(2),
/// the middle unit vector for odd n, and i (e_j - e_{n-1-j}) / sqrt(2),
/// Q^H A Q is real symmetric, so the projection needs a real
/// eigendecomposition only. The imaginary part of Q^H A Q (rounding noise
/// for centrohermitian input) is discarded.
///
/// The real solve uses Eigen rather than LAPACK: some OpenBLAS builds
/// (0.3.20 on AVX-512 cores) return wrong real dgemm products from about
/// 200 x 200 on, which corrupts dsyevd from n = 100.
class CentroPsdProjector
{
public:
    explicit CentroPsdProjector(Index n = 0) { resize(n); }

    void resize(Index n)
    {
        n_ = n;
        half_ = n / 2;
        real_.resize(n, n);
        rows_.resize(n, n);
        solver_ = Eigen::SelfAdjointEigenSolver<RMatrix>(n);
    }

    Index project(const CMatrix& m, CMatrix& out)
    {
        if (m.rows() != n_) {
            resize(m.rows());
        }
        to_real(m);
        solver_.compute(real_);
        if (solver_.info() != Eigen::Success) {
            throw NumericalError("CentroPsdProjector: eigendecomposition failed");
        }
        out.resize(n_, n_);
        const RVector& values = solver_.eigenvalues();
        const Index found = detail::positive_count(values);
        if (found == 0) {
            out.setZero();
            return 0;
        }
        const auto v = solver_.eigenvectors().rightCols(found);
        real_.noalias() = v * values.tail(found).asDiagonal() * v.transpose();
        from_real(out);
        return found;
    }

private:
    // Index of the antisymmetric column paired with position j < half.
    Index anti(Index j) const { return n_ - half_ + j; }

    void to_real(const CMatrix& a)
    {
        const double r2 = std::sqrt(0.5);
        const Index odd = n_ - 2 * half_;
        CMatrix& b = rows_;
        // b = A Q, column by column.
        for (Index j = 0; j < half_; ++j) {
            const Index jj = n_ - 1 - j;
            for (Index r = 0; r < n_; ++r) {
                const Complex x = a(r, j);
                const Complex y = a(r, jj);
                b(r, j) = r2 * (x + y);
                b(r, anti(j)) = Complex(0.0, r2) * (x - y);
            }
        }
        if (odd) {
            b.col(half_) = a.col(half_);
        }
        // real_ = Re(Q^H b), row by row.
        for (Index c = 0; c < n_; ++c) {
            for (Index j = 0; j < half_; ++j) {
                const Complex x = b(j, c);
                const Complex y = b(n_ - 1 - j, c);
                real_(j, c) = r2 * (x + y).real();
                real_(anti(j), c) = r2 * (x - y).imag();
            }
            if (odd) {
                real_(half_, c) = b(half_, c).real();
            }
        }
    }

    void from_real(CMatrix& out)
    {
        const double r2 = std::sqrt(0.5);
        const Index odd = n_ - 2 * half_;
        CMatrix& e = rows_;
        // e = Q R, row by row.
        for (Index c = 0; c < n_; ++c) {
            for (Index j = 0; j < half_; ++j) {
                const double s = real_(j, c);
                const double t = real_(anti(j), c);
                e(j, c) = Complex(r2 * s, r2 * t);
                e(n_ - 1 - j, c) = Complex(r2 * s, -r2 * t);
            }
            if (odd) {
                e(half_, c) = real_(half_, c);
            }
        }
        // out = e Q^H, column by column.
        for (Index j = 0; j < half_; ++j) {
            for (Index r = 0; r < n_; ++r) {
                const Complex s = e(r, j);
                const Complex t = e(r, anti(j));
                out(r, j) = r2 * (s - Complex(0.0, 1.0) * t);
                out(r, n_ - 1 - j) = r2 * (s + Complex(0.0, 1.0) * t);
            }
        }
        if (odd) {
            out.col(half_) = e.col(half_);
        }
    }

    Index n_ = 0;
    Index half_ = 0;
    RMatrix real_;
    CMatrix rows_;
    Eigen::SelfAdjointEigenSolver<RMatrix> solver_;
};

inline double min_eigenvalue(const CMatrix& m)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace boac

#endif
