#pragma once

#include <stdexcept>
#include <string>

namespace fhe {

// Base for every error raised by the library. The CLI maps the concrete
// type onto its exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: violated preconditions, malformed config, inadmissible weight.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Iterative procedure (quadrature, descent) failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// V+ vanishes on the grid, or no starting point with positive constraint value.
class InadmissibleWeightError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace detail

}  // namespace fhe
