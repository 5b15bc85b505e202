#pragma once

#include <stdexcept>
#include <string>

namespace sphf {

// Base classes map onto CLI exit codes: InputError -> 2, MathError -> 3,
// ResourceError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};

struct MathError : Error {
    using Error::Error;
};

struct ResourceError : Error {
    using Error::Error;
};

struct ParseError : InputError {
    using InputError::InputError;
};

struct ZeroDenominator : ParseError {
    using ParseError::ParseError;
};

struct InvalidMeasurementTable : InputError {
    using InputError::InputError;
};

struct MalformedTriangulation : InputError {
    using InputError::InputError;
};

struct MalformedPath : InputError {
    using InputError::InputError;
};

struct ConfigMismatch : InputError {
    using InputError::InputError;
};

struct OutsideWindow : InputError {
    using InputError::InputError;
};

struct NegativeSquareRoot : MathError {
    using MathError::MathError;
};

struct ExactSqrtUnavailable : MathError {
    using MathError::MathError;
};

struct AntipodalOrCoincident : MathError {
    using MathError::MathError;
};

struct HeronViolation : MathError {
    using MathError::MathError;
};

struct DegenerateDiagonal : MathError {
    using MathError::MathError;
};

struct CoherencePivotZero : MathError {
    using MathError::MathError;
};

struct InterlockMismatch : MathError {
    using MathError::MathError;
};

struct ValidationFailure : MathError {
    using MathError::MathError;
};

struct ResourceCap : ResourceError {
    using ResourceError::ResourceError;
};

}  // namespace sphf
