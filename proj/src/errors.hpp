#pragma once

#include <stdexcept>

namespace nomasec {

// A scenario violates a physical invariant (negative effective variance,
// out-of-range power split, ...). The message names the offending field.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature exhausted its subdivision budget before reaching the
// requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The strong-user rate failed the monotonicity pre-scan during power
// allocation; equality matching would be meaningless.
class NonMonotoneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A provable internal consistency condition failed (e.g. an ESR total far
// below zero). Indicates a formula bug, not bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace nomasec
