#pragma once

#include <stdexcept>
#include <string>

namespace nestca {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invariant or precondition violation (bad spec, arity mismatch, out-of-range
// argument). Maps to CLI exit code 2.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Raised when a nested speed spec violates the cumulative bound
// sum(v_j^2) <= u^2, i.e. the square root argument would go negative.
struct SpeedExceedsLimit : Error {
    double sum_of_squares;
    double u_squared;

    SpeedExceedsLimit(double sum_sq, double u_sq)
        : Error("speed exceeds limit: sum of squared level speeds " +
                std::to_string(sum_sq) + " > u^2 = " + std::to_string(u_sq)),
          sum_of_squares(sum_sq),
          u_squared(u_sq) {}
};

// Filesystem / stream failure. Maps to CLI exit code 3.
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace nestca
