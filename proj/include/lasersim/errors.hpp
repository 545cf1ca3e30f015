#pragma once

#include <stdexcept>
#include <string>

namespace lasersim {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid arguments, out-of-domain parameters, malformed configs.
struct DomainError : Error {
    using Error::Error;
};

// Mismatched or non-square matrix dimensions.
struct ShapeError : DomainError {
    using DomainError::DomainError;
};

// A numerically computed quantity violated its contract (bad eigenvalue,
// trace drift, non-positive determinant, ...).
struct NumericalError : Error {
    using Error::Error;
};

// Truncated Fock space too small: population leaked to the boundary levels.
struct HeadroomError : NumericalError {
    using NumericalError::NumericalError;
};

// An iterative/adaptive scheme failed to reach its tolerance
// (operator-sum cutoff growth, integrator step-size gate).
struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

// Scalar prefactor overflow in coefficient evaluation.
struct OverflowError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace lasersim
