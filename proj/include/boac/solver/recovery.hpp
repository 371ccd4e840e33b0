#ifndef BOAC_SOLVER_RECOVERY_HPP
#define BOAC_SOLVER_RECOVERY_HPP

#include <string>
#include <vector>

#include "boac/solver/denoise.hpp"
#include "boac/spectral/vandermonde.hpp"

namespace boac
{

struct RecoveryDiagnostics
{
    int iterations = 0;
    bool converged = false;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double objective = 0.0;
    Index rank = 0;
    double decomposition_residual = 0.0;
    /// |sum of support amplitudes - atomic norm value|.
    double amplitude_sum_gap = 0.0;
    bool decomposition_failed = false;
    std::string warning;
};

struct RecoveryResult
{
    /// (1/K) ||X_hat||_A - gamma.
    double mean_estimate = 0.0;
    /// (1/K) ||X_hat||_A, the estimate before the offset is removed.
    double shifted_mean = 0.0;
    std::vector<SpectralComponent> support;
    double atomic_norm_value = 0.0;
    RecoveryDiagnostics diagnostics;
};

/// Mean estimate from a denoising solution, with the delay support read off
/// the Toeplitz generator. A failed decomposition leaves the support empty
/// and sets a warning; the estimate itself depends only on the norm value.
inline RecoveryResult recover_mean(const DenoiseSolution& solution, int k, double gamma,
                                   double rank_tol = kDefaultRankTol)
{
    if (k < 1) {
        throw DomainError("recover_mean: K must be positive");
    }
    RecoveryResult res;
    res.atomic_norm_value = solution.atomic_norm_value;
    res.shifted_mean = solution.atomic_norm_value / static_cast<double>(k);
    res.mean_estimate = res.shifted_mean - gamma;

    auto& d = res.diagnostics;
    d.iterations = solution.iterations;
    d.converged = solution.converged;
    d.primal_residual = solution.primal_residual;
    d.dual_residual = solution.dual_residual;
    d.objective = solution.objective;
    if (!solution.converged) {
        d.warning = "solver did not converge";
    }
    if (solution.atomic_norm_value == 0.0) {
        return res;
    }
    try {
        const VandermondeDecomposition dec = vandermonde_decompose(solution.u, rank_tol);
        res.support = dec.components;
        d.rank = dec.rank;
        d.decomposition_residual = dec.relative_residual;
        double total = 0.0;
        for (const auto& c : res.support) {
            total += c.amplitude;
        }
        d.amplitude_sum_gap = std::abs(total - solution.atomic_norm_value);
    } catch (const DecompositionError& e) {
        d.decomposition_failed = true;
        d.warning = e.what();
    }
    return res;
}

} // namespace boac

#endif
