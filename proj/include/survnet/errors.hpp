#pragma once

#include <stdexcept>
#include <string>

namespace survnet {

/// Base class of all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user-supplied configuration (bad flag value, empty split, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable input data (CSV cell, IDX header, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Incompatible matrix/model dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Non-finite values where finite numbers are required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Training diverged (non-finite loss or weights).
class TrainingError : public Error {
public:
    using Error::Error;
};

/// Selection run ended with every original variable eliminated.
class AbortedRunError : public Error {
public:
    using Error::Error;
};

/// Internal contract violation; indicates a bug in the calling code.
class LogicError : public std::logic_error {
public:
    explicit LogicError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace survnet
