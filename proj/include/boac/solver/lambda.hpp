#ifndef BOAC_SOLVER_LAMBDA_HPP
#define BOAC_SOLVER_LAMBDA_HPP

#include <cmath>

#include "boac/spectral/sample_grid.hpp"
#include "boac/types.hpp"

namespace boac
{

inline constexpr double kDefaultLambdaMax = 1e6;
/// Calibrated at L = 65, K = 5, SNR 10 dB (see `calibrate-lambda`).
inline constexpr double kDefaultLambdaScale = 2.0;

/// Noise-scaled fit weight c / (sigma sqrt(L ln L)); lambda_max when sigma = 0.
///
/// `sigma` is the per-entry standard deviation of the noise on the Fourier
/// samples F^{-H} V that the fit term compares against.
inline double select_lambda(double sigma, Index length, double scale_c,
                            double lambda_max = kDefaultLambdaMax)
{
    if (length < 2) {
        throw DomainError("select_lambda: need at least two samples");
    }
    if (!(scale_c > 0.0) || !std::isfinite(scale_c)) {
        throw DomainError("select_lambda: scale_c must be positive");
    }
    if (!(sigma >= 0.0)) {
        throw DomainError("select_lambda: sigma must be nonnegative");
    }
    if (sigma == 0.0) {
        return lambda_max;
    }
    const double l = static_cast<double>(length);
    return scale_c / (sigma * std::sqrt(l * std::log(l)));
}

inline double select_lambda(double sigma, const SampleGrid& grid, double scale_c,
                            double lambda_max = kDefaultLambdaMax)
{
    return select_lambda(sigma, grid.length(), scale_c, lambda_max);
}

/// Weight on ||X - V||^2 for a measurement whose Fourier samples carry
/// per-entry noise `sigma`.
///
/// ||X - V||^2 = ||F^{-H}(X - V)||^2 / L, so the per-sample rule is scaled
/// by L. The noiseless cap is returned unscaled.
inline double measurement_lambda(double sigma, const SampleGrid& grid, double scale_c,
                                 double lambda_max = kDefaultLambdaMax)
{
    const double per_sample = select_lambda(sigma, grid, scale_c, lambda_max);
    if (sigma == 0.0) {
        return per_sample;
    }
    return std::min(lambda_max, static_cast<double>(grid.length()) * per_sample);
}

} // namespace boac

#endif
