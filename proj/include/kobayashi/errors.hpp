#pragma once

#include <stdexcept>
#include <string>

namespace kobayashi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point or parameter lies outside the set where the operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative method failed to converge.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Inputs coincide or otherwise make the requested object undefined.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// The nearest boundary point is not unique.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

/// The operation has no implementation for this domain variant.
class UnsupportedDomain : public Error {
public:
    using Error::Error;
};

/// A domain failed its convexity audit.
class InvalidDomain : public Error {
public:
    using Error::Error;
};

/// Malformed user input (JSON, literals, flags).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace kobayashi
