// Shared scalar/matrix aliases, the project-wide tolerance default, and the
// error hierarchy used across the library.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// All validity checks default to this tolerance unless a caller overrides it.
inline constexpr double kDefaultTol = 1e-9;

// Base class for everything the library throws.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad dimension, out-of-range scalar argument, or an operation that is
// undefined for the given dimension (e.g. the star product at d = 2).
struct DomainError : Error {
    using Error::Error;
};

// Input fails a structural validity requirement (non-Hermitian matrix,
// wrong trace, negative eigenvalue, invalid POVM handed to an operation).
struct ValidationError : Error {
    using Error::Error;
};

// A POVM element has rank above one; the caller must refine it first.
struct NeedsRefinementError : Error {
    using Error::Error;
};

// A stated precondition does not hold for the given arguments
// (e.g. a claimed conical dependency that fails to reconstruct).
struct PreconditionError : Error {
    using Error::Error;
};

// The problem posed has no solution (non-closing ternary parameters,
// statistics no measurement can reproduce).
struct InfeasibleError : Error {
    using Error::Error;
};

// A numerical solver failed to reach its required accuracy.
struct SolverError : Error {
    using Error::Error;
};

// Heuristic optimization produced no feasible candidate at all.
struct OptimizationError : Error {
    using Error::Error;
};

// Internal invariant broke (tolerance failure, recursion guard).
struct InternalError : Error {
    using Error::Error;
};

}  // namespace qbound
