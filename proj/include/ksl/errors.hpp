#pragma once

#include <stdexcept>
#include <string>

namespace ksl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad input from a caller: malformed scenario, mixed lines, unsorted division
struct UsageError : Error {
    using Error::Error;
};

// operation called outside its domain (predecessor of a left-dense point ...)
struct PreconditionError : Error {
    using Error::Error;
};

struct RepresentationError : Error {
    using Error::Error;
};

struct CapacityError : Error {
    using Error::Error;
};

// carries the best estimate we had when giving up
struct NonconvergenceError : Error {
    double last = 0.0;
    double bracket = 0.0;
    NonconvergenceError(const std::string& what, double last_value = 0.0, double last_bracket = 0.0)
        : Error(what), last(last_value), bracket(last_bracket) {}
};

}  // namespace ksl
