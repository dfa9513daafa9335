#pragma once

#include <stdexcept>
#include <string>

namespace atlas {

// Base class so callers can catch everything thrown by the library at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (t <= 0, r beyond tail validity).
struct DomainError : Error {
    using Error::Error;
};

// A quantity ran off the grid; the caller should widen the window.
struct OverflowError : Error {
    using Error::Error;
};

// Inconsistent arguments (grid mismatch, short boundary path).
struct UsageError : Error {
    using Error::Error;
};

// Bad configuration or model description.
struct ConfigError : Error {
    using Error::Error;
};

// Iterative solver or oracle failed to converge.
struct SolverError : Error {
    using Error::Error;
};

}  // namespace atlas
