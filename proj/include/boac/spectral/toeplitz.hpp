#ifndef BOAC_SPECTRAL_TOEPLITZ_HPP
#define BOAC_SPECTRAL_TOEPLITZ_HPP

#include "boac/types.hpp"

namespace boac
{

/// Generator u of the Hermitian Toeplitz matrix
///
///     Toep(u) = [ u1   u2  ... uL
///                 u2*  u1  ... u(L-1)
///                 ...
///                 uL*  ...     u1 ].
///
/// The imaginary part of u1 is dropped on construction so Toep(u) is
/// Hermitian exactly.
class ToeplitzGenerator
{
public:
    ToeplitzGenerator() = default;
    explicit ToeplitzGenerator(CVector u) : u_(std::move(u))
    {
        if (u_.size() == 0) {
            throw DomainError("ToeplitzGenerator: empty generator");
        }
        u_(0) = u_(0).real();
    }

    const CVector& coefficients() const noexcept { return u_; }
    Index size() const noexcept { return u_.size(); }
    double diagonal() const { return u_(0).real(); }

    CMatrix matrix() const
    {
        const Index l = u_.size();
        CMatrix t(l, l);
        for (Index c = 0; c < l; ++c) {
            for (Index r = 0; r < l; ++r) {
                t(r, c) = c >= r ? u_(c - r) : std::conj(u_(r - c));
            }
        }
        return t;
    }

    /// Least-squares projection of a Hermitian matrix onto Toeplitz structure.
    static ToeplitzGenerator nearest(const CMatrix& m)
    {
        const Index l = m.rows();
        CVector u(l);
        for (Index d = 0; d < l; ++d) {
            Complex s = 0.0;
            for (Index r = 0; r + d < l; ++r) {
                s += 0.5 * (m(r, r + d) + std::conj(m(r + d, r)));
            }
            u(d) = s / static_cast<double>(l - d);
        }
        return ToeplitzGenerator(std::move(u));
    }

private:
    CVector u_;
};

} // namespace boac

#endif
