#ifndef BOAC_SPECTRAL_SAMPLE_GRID_HPP
#define BOAC_SPECTRAL_SAMPLE_GRID_HPP

#include <string>

#include "boac/types.hpp"

namespace boac
{

/// Symmetric sampling grid of odd length L = 2M + 1.
///
/// Frequency and time indices run over the symmetric range {-M, ..., M}.
/// Vectors are stored with index `symmetric + M`, so storage index 0 holds
/// symmetric index -M and storage index M holds symmetric index 0.
class SampleGrid
{
public:
    /// Grid with L samples; L must be odd and at least 3.
    static SampleGrid with_length(Index length)
    {
        if (length < 3 || length % 2 == 0) {
            throw DomainError("SampleGrid: length must be odd and >= 3, got " +
                              std::to_string(length));
        }
        return SampleGrid((length - 1) / 2);
    }

    static SampleGrid with_half_width(Index half_width)
    {
        if (half_width < 1) {
            throw DomainError("SampleGrid: half width must be >= 1");
        }
        return SampleGrid(half_width);
    }

    /// Smallest odd length >= nominal (8 -> 9, 128 -> 129, 129 -> 129).
    static Index odd_length_at_least(Index nominal)
    {
        if (nominal < 3) {
            return 3;
        }
        return nominal % 2 == 0 ? nominal + 1 : nominal;
    }

    Index length() const noexcept { return 2 * half_width_ + 1; }
    Index half_width() const noexcept { return half_width_; }

    Index storage_index(Index symmetric) const
    {
        if (symmetric < -half_width_ || symmetric > half_width_) {
            throw DomainError("SampleGrid: symmetric index out of range");
        }
        return symmetric + half_width_;
    }

    Index symmetric_index(Index storage) const
    {
        if (storage < 0 || storage >= length()) {
            throw DomainError("SampleGrid: storage index out of range");
        }
        return storage - half_width_;
    }

    /// Storage index of symmetric index `symmetric` reduced modulo L.
    Index wrapped_storage_index(Index symmetric) const
    {
        const Index l = length();
        Index s = ((symmetric + half_width_) % l + l) % l;
        return s;
    }

    friend bool operator==(const SampleGrid&, const SampleGrid&) = default;

private:
    explicit SampleGrid(Index half_width) : half_width_(half_width) {}

    Index half_width_;
};

} // namespace boac

#endif
