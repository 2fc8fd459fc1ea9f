#pragma once

#include <stdexcept>
#include <string>

namespace rencontre {

// Base for all input-validation failures. CLI maps these to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatchError : ValidationError {
    using ValidationError::ValidationError;
};

struct ProbabilityRangeError : ValidationError {
    using ValidationError::ValidationError;
};

struct DimensionTooSmallError : ValidationError {
    using ValidationError::ValidationError;
};

// Request outside an operation's stated domain (n = 0, horizon caps, ...).
struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

// Exact-rational evaluation asked for a horizon above the configured cap.
struct ExactCapError : DomainError {
    using DomainError::DomainError;
};

// A numeric invariant (e.g. f_n >= -1e-12 in float mode) was violated.
// Raised instead of clamping so accumulation bugs stay visible.
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rencontre
