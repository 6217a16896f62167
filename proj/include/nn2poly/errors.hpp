#pragma once

#include <stdexcept>
#include <string>

namespace nn2poly {

/// Malformed input: bad shapes, unknown names, out-of-range labels.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values appearing during a computation (e.g. a NaN training loss).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured resource ceiling was exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nn2poly
