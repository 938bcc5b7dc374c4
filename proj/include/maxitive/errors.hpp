#pragma once

#include <stdexcept>
#include <string>

namespace maxitive {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input documents (JSON schema violations, bad grid specs, ...).
struct parse_error : error {
    using error::error;
};

/// Inputs that parse but violate a precondition or invariant
/// (unknown label, mode mismatch, unnormalized input, infeasible target, ...).
struct validation_error : error {
    using error::error;
};

/// Numerical optimization failed to converge.
struct optimizer_error : error {
    using error::error;
};

/// Filesystem / stream failures.
struct io_error : error {
    using error::error;
};

}  // namespace maxitive
