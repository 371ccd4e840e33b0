#ifndef BOAC_SOLVER_DENOISE_HPP
#define BOAC_SOLVER_DENOISE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "boac/numeric/hermitian.hpp"
#include "boac/spectral/atoms.hpp"
#include "boac/spectral/toeplitz.hpp"
#include "boac/spectral/vandermonde.hpp"

namespace boac
{

/// Which atomic set the SDP describes.
///
/// Nonnegative: X is a nonnegative combination of atoms. Its Fourier
/// samples are then the moments z_{-d} = c_d, z_d = conj(c_d) (d = 0..M) of
/// a nonnegative measure on [0, 1), which holds exactly when the
/// (M+1) x (M+1) Toeplitz matrix of c is PSD; the norm is c_0. The solver
/// works on that matrix and afterwards extends c to the length-L generator u
/// of the block form, so the reported solution has the same shape in both
/// models.
///
/// ComplexPhase: the block SDP over (u, z, t) with z free, whose atoms carry
/// arbitrary complex weights. It agrees with the nonnegative model whenever
/// the minimizer is a nonnegative mixture.
enum class AmplitudeModel
{
    Nonnegative,
    ComplexPhase,
};

/// Settings of the ADMM splitting for the atomic-norm denoising SDP.
struct SolverConfig
{
    AmplitudeModel amplitudes = AmplitudeModel::Nonnegative;
    int max_iterations = 20000;
    double primal_tol = 1e-6;
    double dual_tol = 1e-6;
    /// Allowed PSD violation of the returned block, relative to 1 + ||u||.
    double psd_projection_tol = 1e-6;

    /// Penalty schedule: rho starts at initial_rho (or sqrt(L)/||F^{-H}V||
    /// when zero) and is rebalanced every `adapt_every` iterations while the
    /// iteration count is below `adapt_until`; after that it is frozen.
    double initial_rho = 0.0;
    int adapt_every = 5;
    int adapt_until = 100;
    double adapt_ratio = 2.0;
    double adapt_factor = 2.0;

    bool record_history = false;

    void validate() const
    {
        if (max_iterations < 1) {
            throw DomainError("SolverConfig: max_iterations must be at least 1");
        }
        if (!(primal_tol > 0.0) || !(dual_tol > 0.0) || !(psd_projection_tol > 0.0)) {
            throw DomainError("SolverConfig: tolerances must be positive");
        }
        if (!(initial_rho >= 0.0) || adapt_every < 0 || !(adapt_ratio > 1.0) ||
            !(adapt_factor > 1.0)) {
            throw DomainError("SolverConfig: invalid penalty schedule");
        }
    }
};

/// min ||X||_A + lambda * fit(X, V).
///
/// The fit is (1/L) sum_r w_r |[F^{-H}(X - V)]_r|^2 with weights of mean
/// one; unit weights give lambda ||X - V||^2. Non-uniform weights whiten
/// noise that is colored in the Fourier domain.
class DenoiseProblem
{
public:
    DenoiseProblem(CVector v, double lambda, SampleGrid grid, RVector fit_weights = {})
        : v_(std::move(v)), lambda_(lambda), grid_(grid), weights_(std::move(fit_weights))
    {
        if (v_.size() != grid_.length()) {
            throw DomainError("DenoiseProblem: measurement length does not match grid");
        }
        if (!v_.allFinite()) {
            throw DomainError("DenoiseProblem: measurement has non-finite entries");
        }
        if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
            throw DomainError("DenoiseProblem: lambda must be positive and finite");
        }
        if (weights_.size() == 0) {
            weights_ = RVector::Ones(grid_.length());
        }
        if (weights_.size() != grid_.length() || !weights_.allFinite() ||
            !(weights_.minCoeff() > 0.0)) {
            throw DomainError("DenoiseProblem: fit weights must be positive, one per sample");
        }
        weights_ /= weights_.mean();
    }

    const CVector& measurement() const noexcept { return v_; }
    double lambda() const noexcept { return lambda_; }
    const SampleGrid& grid() const noexcept { return grid_; }
    const RVector& fit_weights() const noexcept { return weights_; }

    /// lambda * fit(X, V) computed from Fourier samples.
    double fit_term(const CVector& x_fourier, const CVector& v_fourier) const
    {
        const double l = static_cast<double>(grid_.length());
        return lambda_ / l * (weights_.array() * (x_fourier - v_fourier).array().abs2()).sum();
    }

private:
    CVector v_;
    double lambda_;
    SampleGrid grid_;
    RVector weights_;
};

struct DenoiseSolution
{
    CVector x_hat;
    ToeplitzGenerator u;
    double t = 0.0;
    double objective = 0.0;
    double atomic_norm_value = 0.0;
    int iterations = 0;
    bool converged = false;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    /// Diagonal shift applied to make the returned PSD constraint hold.
    double max_psd_violation = 0.0;
    std::vector<double> objective_history;
};

namespace detail
{

/// [[Toep(u), z], [z^H, t]].
inline void assemble_block(const CVector& u, const CVector& z, double t, CMatrix& out)
{
    const Index l = u.size();
    for (Index c = 0; c < l; ++c) {
        for (Index r = 0; r < l; ++r) {
            out(r, c) = c >= r ? u(c - r) : std::conj(u(r - c));
        }
        out(c, l) = z(c);
        out(l, c) = std::conj(z(c));
    }
    out(l, l) = t;
}

inline void assemble_toeplitz(const CVector& c, CMatrix& out)
{
    const Index n = c.size();
    for (Index col = 0; col < n; ++col) {
        for (Index r = 0; r < n; ++r) {
            out(r, col) = col >= r ? c(col - r) : std::conj(c(r - col));
        }
    }
}

/// Mean of the d-th superdiagonal of the Hermitian part of w, d = 0..count-1.
inline CVector averaged_diagonals(const CMatrix& w, Index count)
{
    const Index n = std::min<Index>(w.rows(), count);
    CVector out(count);
    for (Index d = 0; d < n; ++d) {
        Complex acc = 0.0;
        for (Index r = 0; r + d < n; ++r) {
            acc += 0.5 * (w(r, r + d) + std::conj(w(r + d, r)));
        }
        out(d) = acc / static_cast<double>(n - d);
    }
    return out;
}

/// Fourier samples of the measure with moments c: z_{-d} = c_d, z_d = conj(c_d).
inline CVector moments_to_samples(const CVector& c, Index half_width)
{
    CVector z(2 * half_width + 1);
    z(half_width) = c(0).real();
    for (Index d = 1; d <= half_width; ++d) {
        z(half_width - d) = c(d);
        z(half_width + d) = std::conj(c(d));
    }
    return z;
}

/// Scaled-form ADMM for  min f(x)  s.t.  Theta(x) = S, S PSD.
///
/// `update(work, rho, theta)` minimizes f(x) + rho/2 ||Theta(x) - work||_F^2
/// and writes Theta(x); `objective()` evaluates f at the last update.
/// `Projector` maps a Hermitian matrix to its PSD part.
template <class Projector, class Update, class Objective>
void run_admm(Index n, double rho, const SolverConfig& config, Update&& update,
              Objective&& objective, DenoiseSolution& sol)
{
    CMatrix s = CMatrix::Zero(n, n);
    CMatrix dual = CMatrix::Zero(n, n);
    CMatrix theta = CMatrix::Zero(n, n);
    CMatrix work(n, n);
    CMatrix s_next(n, n);
    Projector projector(n);

    int it = 0;
    for (; it < config.max_iterations; ++it) {
        work = s + dual / rho;
        update(work, rho, theta);
        if (!theta.allFinite()) {
            throw SolverError("atomic_denoise: iterate became non-finite");
        }
        work = theta - dual / rho;
        projector.project(work, s_next);
        dual += rho * (s_next - theta);

        const double primal = (s_next - theta).norm();
        const double dual_step = rho * (s_next - s).norm();
        s.swap(s_next);

        sol.primal_residual = primal / std::max(1.0, theta.norm());
        sol.dual_residual = dual_step / std::max(1.0, dual.norm());
        if (config.record_history) {
            sol.objective_history.push_back(objective());
        }
        if (sol.primal_residual <= config.primal_tol && sol.dual_residual <= config.dual_tol) {
            sol.converged = true;
            ++it;
            break;
        }
        if (config.adapt_every > 0 && it < config.adapt_until && it % config.adapt_every == 0) {
            if (sol.primal_residual > config.adapt_ratio * sol.dual_residual) {
                rho *= config.adapt_factor;
            } else if (sol.dual_residual > config.adapt_ratio * sol.primal_residual) {
                rho /= config.adapt_factor;
            }
        }
    }
    sol.iterations = it;
}

/// Length-L generator whose Toeplitz matrix is PSD and whose first M+1
/// entries reproduce the moments c (up to the decomposition tolerance).
inline CVector extend_moments(const CVector& c, Index length)
{
    CMatrix t(c.size(), c.size());
    assemble_toeplitz(c, t);
    const double floor = std::max(0.0, min_eigenvalue(t));
    try {
        CVector singular = c;
        singular(0) -= floor;
        const auto dec = vandermonde_decompose(ToeplitzGenerator(singular));
        CVector u = toeplitz_from_components(dec.components, length).coefficients();
        // A flat spectrum extends by zeros at every nonzero lag.
        u(0) += floor;
        return u;
    } catch (const DecompositionError&) {
        CVector u = CVector::Zero(length);
        u.head(c.size()) = c;
        return u;
    }
}

inline void finish_block(const SampleGrid& grid, const RVector& mu, const CVector& y,
                         CVector u, const CVector& z, double t, DenoiseSolution& sol)
{
    const Index l = grid.length();
    CMatrix block(l + 1, l + 1);
    assemble_block(u, z, t, block);
    const double shift = std::max(0.0, -min_eigenvalue(block));
    u(0) = u(0).real() + shift;
    t += shift;
    sol.max_psd_violation += shift;

    double fit = 0.0;
    for (Index r = 0; r < l; ++r) {
        fit += mu(r) * std::norm(z(r) - y(r));
    }
    sol.x_hat = from_fourier_samples(z, grid);
    sol.u = ToeplitzGenerator(std::move(u));
    sol.t = std::max(0.0, t);
    sol.atomic_norm_value = std::max(0.0, 0.5 * (sol.u.diagonal() + sol.t));
    sol.objective = 0.5 * (sol.u.diagonal() + sol.t) + fit;
}

inline void solve_moment_form(const SampleGrid& grid, const RVector& mu, const CVector& y,
                              double rho, const SolverConfig& config, DenoiseSolution& sol)
{
    const Index m = grid.half_width();
    const Index n = m + 1;
    CVector c = CVector::Zero(n);

    auto update = [&](const CMatrix& work, double r, CMatrix& theta) {
        const CVector avg = averaged_diagonals(work, n);
        const double fn = static_cast<double>(n);
        c(0) = (r * fn * avg(0).real() + 2.0 * mu(m) * y(m).real() - 1.0) /
               (r * fn + 2.0 * mu(m));
        for (Index d = 1; d < n; ++d) {
            const double a = r * static_cast<double>(n - d);
            c(d) = (a * avg(d) + mu(m - d) * y(m - d) + mu(m + d) * std::conj(y(m + d))) /
                   (a + mu(m - d) + mu(m + d));
        }
        assemble_toeplitz(c, theta);
    };
    auto objective = [&] {
        const CVector z = moments_to_samples(c, m);
        double fit = 0.0;
        for (Index r = 0; r < grid.length(); ++r) {
            fit += mu(r) * std::norm(z(r) - y(r));
        }
        return c(0).real() + fit;
    };
    // Toeplitz iterates stay centrohermitian, so a real projection suffices.
    run_admm<CentroPsdProjector>(n, rho, config, update, objective, sol);

    CMatrix t(n, n);
    assemble_toeplitz(c, t);
    const double shift = std::max(0.0, -min_eigenvalue(t));
    c(0) += shift;
    sol.max_psd_violation = shift;

    const CVector z = moments_to_samples(c, m);
    finish_block(grid, mu, y, extend_moments(c, grid.length()), z, c(0).real(), sol);
}

inline void solve_block_form(const SampleGrid& grid, const RVector& mu, const CVector& y,
                             double rho, const SolverConfig& config, DenoiseSolution& sol)
{
    const Index l = grid.length();
    CVector u = CVector::Zero(l);
    CVector z = CVector::Zero(l);
    double t = 0.0;

    auto update = [&](const CMatrix& work, double r, CMatrix& theta) {
        t = work(l, l).real() - 1.0 / (2.0 * r);
        u = averaged_diagonals(work.topLeftCorner(l, l), l);
        u(0) = u(0).real() - 1.0 / (2.0 * r * static_cast<double>(l));
        for (Index i = 0; i < l; ++i) {
            const Complex col = 0.5 * (work(i, l) + std::conj(work(l, i)));
            z(i) = (mu(i) * y(i) + r * col) / (mu(i) + r);
        }
        assemble_block(u, z, t, theta);
    };
    auto objective = [&] {
        double fit = 0.0;
        for (Index i = 0; i < l; ++i) {
            fit += mu(i) * std::norm(z(i) - y(i));
        }
        return 0.5 * (u(0).real() + t) + fit;
    };
    run_admm<PsdProjector>(l + 1, rho, config, update, objective, sol);
    finish_block(grid, mu, y, u, z, t, sol);
}

} // namespace detail

/// ADMM on the PSD-constrained form of the denoising problem.
///
/// Each iteration minimizes the augmented Lagrangian over the structured
/// variables in closed form (weighted averages of the matching matrix
/// entries and the data), projects onto the PSD cone, and takes a dual step.
/// The penalty is rebalanced during the first iterations and then frozen.
/// The returned point is made exactly feasible by a diagonal shift, which is
/// reported as max_psd_violation.
inline DenoiseSolution atomic_denoise(const DenoiseProblem& problem,
                                      const SolverConfig& config = {})
{
    config.validate();
    const SampleGrid& grid = problem.grid();
    const Index l = grid.length();
    const CVector y = fourier_samples(problem.measurement(), grid);

    DenoiseSolution sol;
    if (y.squaredNorm() == 0.0) {
        sol.x_hat = CVector::Zero(l);
        sol.u = ToeplitzGenerator(CVector::Zero(l));
        sol.converged = true;
        return sol;
    }
    const RVector mu = problem.fit_weights() * (problem.lambda() / static_cast<double>(l));
    const double rho = config.initial_rho > 0.0 ? config.initial_rho
                                                : std::sqrt(static_cast<double>(l)) / y.norm();
    if (config.amplitudes == AmplitudeModel::Nonnegative) {
        detail::solve_moment_form(grid, mu, y, rho, config, sol);
    } else {
        detail::solve_block_form(grid, mu, y, rho, config, sol);
    }
    return sol;
}

/// Smallest eigenvalue of the block [[Toep(u), F^{-H} X], [X^H F^{-1}, t]].
inline double constraint_min_eigenvalue(const DenoiseSolution& sol)
{
    const Index l = sol.u.size();
    CMatrix block(l + 1, l + 1);
    const CVector z = fourier_samples(sol.x_hat, SampleGrid::with_length(l));
    detail::assemble_block(sol.u.coefficients(), z, sol.t, block);
    return min_eigenvalue(block);
}

} // namespace boac

#endif
