#pragma once

#include <stdexcept>
#include <string>

namespace valab {

/// Bad input: malformed files, dimension mismatches, violated preconditions.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine could not certify its result (iteration cap, leakage).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Feasible region of an H-representation is empty.
class EmptyPolytopeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Feasible region of an H-representation is not bounded.
class UnboundedPolytopeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace valab
