#ifndef BOAC_TYPES_HPP
#define BOAC_TYPES_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace boac
{

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Input outside the domain of an operation (bad tau, negative amplitude, ...).
class DomainError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Ill-conditioned or otherwise numerically unusable data.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a random draw cannot satisfy its acceptance test.
class GenerationError : public std::runtime_error
{
public:
    GenerationError(const std::string& what, double best_condition)
        : std::runtime_error(what), best_condition_(best_condition)
    {
    }
    double best_condition() const noexcept { return best_condition_; }

private:
    double best_condition_;
};

class DecompositionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Toeplitz matrix with no Vandermonde representation of rank below L.
class FullRankError : public DecompositionError
{
public:
    using DecompositionError::DecompositionError;
};

class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Noise cannot be scaled to a finite SNR target (zero signal).
class CalibrationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Local loss or gradient evaluated to a non-finite value.
class GradientError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class PrecodeError : public std::invalid_argument
{
public:
    PrecodeError(const std::string& what, Index element, Index device)
        : std::invalid_argument(what), element_(element), device_(device)
    {
    }
    Index element() const noexcept { return element_; }
    Index device() const noexcept { return device_; }

private:
    Index element_;
    Index device_;
};

} // namespace boac

#endif // BOAC_TYPES_HPP
