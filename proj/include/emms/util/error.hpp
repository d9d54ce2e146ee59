#pragma once

#include <stdexcept>
#include <string>

namespace emms {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: wrong sizes, out-of-range dimensions, malformed files.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Numerical failure: singular systems, degenerate frequencies, diverging training.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

} // namespace emms
