#pragma once

#include <stdexcept>
#include <string>

namespace cfrg {

/// Bad input: violated precondition, malformed config, inadmissible data.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative method exhausted its budget or stagnated.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Observed result disagrees with the expected classification.
class MismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem / serialization failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invariant broken inside an algorithm (a bug, not a user error).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace cfrg
