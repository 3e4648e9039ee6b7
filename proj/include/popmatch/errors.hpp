#pragma once

#include <stdexcept>
#include <string>

namespace popmatch {

inline constexpr const char* kToolVersion = "0.1.0";

// Input data breaks a market invariant (dangling id, bad quota, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation invoked under the wrong choice semantics (e.g. rank 0 outside 2019).
struct SemanticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition of a query-style operation violated.
struct QueryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An exhaustive enumeration was refused because the instance exceeds its bound.
struct BoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace popmatch
