#pragma once
#include <stdexcept>
#include <string>

namespace nlkg {

// Error taxonomy for the numerical operations. Everything derives from
// std::runtime_error so callers can catch coarsely; the CLI maps these to
// exit code 3 (numerical-invariant failure).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : NumericalError {
    using NumericalError::NumericalError;
};
struct UnderResolved : NumericalError {
    using NumericalError::NumericalError;
};
struct KernelMismatch : NumericalError {
    using NumericalError::NumericalError;
};
struct NegativeQuadraticForm : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularModulationMatrix : NumericalError {
    using NumericalError::NumericalError;
};
struct NonFinite : NumericalError {
    using NumericalError::NumericalError;
};
struct BracketFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct PreimageNotFound : NumericalError {
    using NumericalError::NumericalError;
};
struct NoDecay : NumericalError {
    using NumericalError::NumericalError;
};
struct NoContraction : NumericalError {
    using NumericalError::NumericalError;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nlkg
