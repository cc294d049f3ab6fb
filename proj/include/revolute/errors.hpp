#pragma once

#include <stdexcept>
#include <string>

namespace revolute {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Family or operation parameters outside their admissible range.
struct ParameterError : Error {
    using Error::Error;
};

// A curve fails a geometric requirement (degenerate length, F <= 0, ...).
struct GeometryError : Error {
    using Error::Error;
};

// Grid too small for the requested operation.
struct SizeError : Error {
    using Error::Error;
};

// Discrete forms are singular or an eigensolve cannot be trusted.
struct ConditioningError : Error {
    using Error::Error;
};

// Trial function unusable in a Rayleigh quotient (zero denominator).
struct DegenerateTrialError : Error {
    using Error::Error;
};

// A pipeline stage was invoked on input that skipped an earlier stage.
struct PipelineOrderError : Error {
    using Error::Error;
};

// Homotopy invariants failed; retry with smaller epsilon/delta.
struct HomotopyParameterError : Error {
    using Error::Error;
};

// Malformed input file.
struct ParseError : Error {
    using Error::Error;
};

// Filesystem failure, carries the offending path.
struct IoError : Error {
    using Error::Error;
};

} // namespace revolute
