#pragma once

#include <stdexcept>
#include <string>

namespace adiafactor {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The integer cannot be used as a factoring instance (even, prime, too small, ...).
class InvalidInstance : public Error {
public:
    using Error::Error;
};

/// A parameter violates an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Sizes disagree or exceed the qubit cap.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The exact integer cost does not fit the cost type.
class CostOverflow : public Error {
public:
    using Error::Error;
};

/// No odd semiprime exists for the requested qubit budget.
class NoInstance : public Error {
public:
    using Error::Error;
};

/// Rejection sampling ran out of retries.
class SamplingExhausted : public Error {
public:
    using Error::Error;
};

/// Numerical failures: the integration is no longer trustworthy.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class NormDriftExceeded : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class WindowUnreachable : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

/// A deadline passed before the computation finished.
class DeadlineExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace adiafactor
