// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace opmeans {

/// Root of the library's error hierarchy. Everything thrown on purpose
/// derives from this, so callers (notably the CLI) can map failures to
/// exit codes without enumerating every concrete type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, unparsable spec strings, invalid
/// parameters. The CLI maps these to exit code 3.
struct InputError : Error {
    using Error::Error;
};

/// An iteration failed to reach its tolerance. The CLI maps these to
/// exit code 2.
struct ConvergenceError : Error {
    using Error::Error;
};

struct NotSymmetric : InputError {
    using InputError::InputError;
};
struct NotPositiveDefinite : InputError {
    using InputError::InputError;
};
struct DimensionMismatch : InputError {
    using InputError::InputError;
};
struct LengthMismatch : InputError {
    using InputError::InputError;
};
struct EmptyInput : InputError {
    using InputError::InputError;
};
struct ParamOutOfRange : InputError {
    using InputError::InputError;
};
struct DomainError : InputError {
    using InputError::InputError;
};
struct ParseError : InputError {
    using InputError::InputError;
};
struct RationalOverflow : Error {
    using Error::Error;
};
struct RecipeInvalid : InputError {
    using InputError::InputError;
};
struct ClassTagMismatch : InputError {
    using InputError::InputError;
};
struct UnsupportedMean : InputError {
    using InputError::InputError;
};

/// Eigensolver sweep cap exceeded.
struct NoConvergence : ConvergenceError {
    using ConvergenceError::ConvergenceError;
};

} // namespace opmeans
