#ifndef BOAC_SOLVER_GRID_ORACLE_HPP
#define BOAC_SOLVER_GRID_ORACLE_HPP

#include "boac/numeric/nnqp.hpp"
#include "boac/solver/denoise.hpp"
#include "boac/solver/recovery.hpp"

namespace boac
{

/// Gridded surrogate of the denoising problem: atoms restricted to delays
/// j / grid_points, solved as a nonnegative lasso
///
///     min_{beta >= 0}  sum_j beta_j + lambda * fit(sum_j beta_j a(j/P), V).
///
/// The fit matches DenoiseProblem, so the objective is directly comparable
/// with atomic_denoise and approaches it from above as the grid is refined.
/// diagnostics.objective holds the optimal value.
inline RecoveryResult grid_oracle(const DenoiseProblem& problem, int grid_points, int k = 1,
                                  double gamma = 0.0)
{
    const SampleGrid& grid = problem.grid();
    const Index l = grid.length();
    const Index m = grid.half_width();
    if (grid_points < 4 * l) {
        throw DomainError("grid_oracle: need at least 4 L grid points");
    }
    const Index p = grid_points;
    const CVector y = fourier_samples(problem.measurement(), grid);
    const RVector& w = problem.fit_weights();
    const double scale = 2.0 * problem.lambda() / static_cast<double>(l);

    // Re(v_j^H W v_k) depends on (j - k) mod P only.
    RVector kernel = RVector::Zero(p);
    for (Index d = 0; d < p; ++d) {
        for (Index s = -m; s <= m; ++s) {
            const Index phase = ((d * s) % p + p) % p;
            kernel(d) += w(s + m) * std::cos(kTwoPi * static_cast<double>(phase) /
                                             static_cast<double>(p));
        }
    }
    RMatrix q(p, p);
    for (Index j = 0; j < p; ++j) {
        for (Index c = 0; c < p; ++c) {
            q(j, c) = scale * kernel(((j - c) % p + p) % p);
        }
    }
    RVector lin(p);
    for (Index j = 0; j < p; ++j) {
        Complex acc = 0.0;
        for (Index s = -m; s <= m; ++s) {
            const Index phase = ((j * s) % p + p) % p;
            acc += w(s + m) * std::polar(1.0, kTwoPi * static_cast<double>(phase) /
                                                  static_cast<double>(p)) *
                   y(s + m);
        }
        lin(j) = 1.0 - scale * acc.real();
    }

    NnqpResult qp;
    try {
        qp = solve_nnqp(q, lin, 1e-12, 50 * static_cast<int>(p));
    } catch (const NumericalError& e) {
        throw SolverError(std::string("grid_oracle: ") + e.what());
    }

    RecoveryResult res;
    double total = 0.0;
    CVector fitted = CVector::Zero(l);
    for (Index j = 0; j < p; ++j) {
        if (qp.x(j) > 0.0) {
            const double tau = static_cast<double>(j) / static_cast<double>(p);
            res.support.push_back({tau, qp.x(j)});
            total += qp.x(j);
            fitted += qp.x(j) * harmonic_vector(tau, grid);
        }
    }
    res.atomic_norm_value = total;
    res.shifted_mean = total / static_cast<double>(k);
    res.mean_estimate = res.shifted_mean - gamma;
    res.diagnostics.iterations = qp.iterations;
    res.diagnostics.converged = true;
    res.diagnostics.objective = total + problem.fit_term(fitted, y);
    res.diagnostics.amplitude_sum_gap = 0.0;
    return res;
}

} // namespace boac

#endif
