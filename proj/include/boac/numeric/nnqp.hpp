#ifndef BOAC_NUMERIC_NNQP_HPP
#define BOAC_NUMERIC_NNQP_HPP

#include <vector>

#include <Eigen/Dense>

#include "boac/types.hpp"

namespace boac
{

struct NnqpResult
{
    RVector x;
    int iterations = 0;
    double max_kkt_violation = 0.0;
};

/// Nonnegative quadratic program  min 1/2 x'Qx + c'x  s.t. x >= 0, Q PSD.
///
/// Lawson-Hanson style active-set iteration: grow the passive set by the
/// coordinate with the most negative gradient, solve the unconstrained
/// subproblem on it, and back-track along the segment when a passive
/// coordinate would turn negative.
inline NnqpResult solve_nnqp(const RMatrix& q, const RVector& c, double tol = 1e-12,
                             int max_outer = 0)
{
    const Index n = c.size();
    if (q.rows() != n || q.cols() != n) {
        throw DomainError("solve_nnqp: dimension mismatch");
    }
    if (max_outer <= 0) {
        max_outer = static_cast<int>(3 * n + 50);
    }
    const double scale = std::max({1.0, q.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
    const double gtol = tol * scale;

    RVector x = RVector::Zero(n);
    std::vector<char> passive(static_cast<std::size_t>(n), 0);
    NnqpResult res;

    auto solve_on = [&](const std::vector<Index>& idx) {
        const Index p = static_cast<Index>(idx.size());
        RMatrix qp(p, p);
        RVector cp(p);
        for (Index i = 0; i < p; ++i) {
            cp(i) = c(idx[i]);
            for (Index j = 0; j < p; ++j) {
                qp(i, j) = q(idx[i], idx[j]);
            }
        }
        Eigen::LDLT<RMatrix> ldlt(qp);
        RVector s;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
            ldlt.vectorD().minCoeff() > 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
            s = ldlt.solve(-cp);
        } else {
            s = qp.completeOrthogonalDecomposition().solve(-cp);
        }
        return s;
    };

    for (int outer = 0; outer < max_outer; ++outer) {
        const RVector grad = q * x + c;
        Index best = -1;
        double best_val = gtol;
        for (Index j = 0; j < n; ++j) {
            if (!passive[j] && -grad(j) > best_val) {
                best_val = -grad(j);
                best = j;
            }
        }
        if (best < 0) {
            res.iterations = outer;
            break;
        }
        passive[best] = 1;
        for (int inner = 0; inner < 4 * n + 10; ++inner) {
            std::vector<Index> idx;
            for (Index j = 0; j < n; ++j) {
                if (passive[j]) {
                    idx.push_back(j);
                }
            }
            const RVector s = solve_on(idx);
            bool feasible = true;
            for (Index i = 0; i < s.size(); ++i) {
                if (s(i) <= 0.0) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                x.setZero();
                for (Index i = 0; i < s.size(); ++i) {
                    x(idx[i]) = s(i);
                }
                break;
            }
            double alpha = 1.0;
            for (Index i = 0; i < s.size(); ++i) {
                if (s(i) <= 0.0) {
                    const double xi = x(idx[i]);
                    const double a = xi / (xi - s(i));
                    alpha = std::min(alpha, a);
                }
            }
            for (Index i = 0; i < s.size(); ++i) {
                x(idx[i]) += alpha * (s(i) - x(idx[i]));
            }
            for (Index i = 0; i < s.size(); ++i) {
                if (x(idx[i]) <= 1e-15 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
                    x(idx[i]) = 0.0;
                    passive[idx[i]] = 0;
                }
            }
        }
        res.iterations = outer + 1;
        if (outer + 1 == max_outer) {
            throw NumericalError("solve_nnqp: active-set iteration limit reached");
        }
    }

    const RVector grad = q * x + c;
    double viol = 0.0;
    for (Index j = 0; j < n; ++j) {
        viol = std::max(viol, x(j) > 0.0 ? std::fabs(grad(j)) : std::max(0.0, -grad(j)));
    }
    res.x = std::move(x);
    res.max_kkt_violation = viol / scale;
    return res;
}

/// min ||A x - b||^2 over real x >= 0 (A, b may be complex).
inline NnqpResult solve_nnls(const CMatrix& a, const CVector& b, double tol = 1e-12)
{
    const RMatrix q = (a.adjoint() * a).real();
    const RVector c = -(a.adjoint() * b).real();
    return solve_nnqp(q, c, tol);
}

} // namespace boac

#endif
