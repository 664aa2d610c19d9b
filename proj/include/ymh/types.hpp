#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ymh {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double pi = std::numbers::pi;
inline const cplx iu{0.0, 1.0};

// Error taxonomy. Each maps to one failure mode named in the module contracts.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct NonConvergentQuadrature : NumericalError {
    using NumericalError::NumericalError;
};
struct DegenerateLattice : NumericalError {
    using NumericalError::NumericalError;
};
struct PathThroughSingularity : NumericalError {
    using NumericalError::NumericalError;
};
struct InvalidModulus : NumericalError {
    using NumericalError::NumericalError;
};
struct NewtonDiverged : NumericalError {
    using NumericalError::NumericalError;
};
struct StepUnderflow : NumericalError {
    using NumericalError::NumericalError;
};
struct TolNotMet : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularSolutionMatrix : NumericalError {
    using NumericalError::NumericalError;
};
struct OnCut : NumericalError {
    using NumericalError::NumericalError;
};
struct ThetaDenominatorZero : NumericalError {
    using NumericalError::NumericalError;
};
struct CharacteristicNullZero : NumericalError {
    using NumericalError::NumericalError;
};
struct NotEigenvector : NumericalError {
    using NumericalError::NumericalError;
};
struct FluxNotInteger : NumericalError {
    using NumericalError::NumericalError;
};
struct NoConvergence : NumericalError {
    using NumericalError::NumericalError;
};
struct BetaBelowOne : NumericalError {
    using NumericalError::NumericalError;
};
struct QuadratureNotConverged : NumericalError {
    using NumericalError::NumericalError;
};
struct FluxSectorMismatch : NumericalError {
    using NumericalError::NumericalError;
};
struct ConfigInvalid : std::runtime_error {
    explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

inline double frobenius(const Mat2& m) { return m.norm(); }

}  // namespace ymh
