// errors.hpp: Exception types shared by the library and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace finitebath {

// Bad input: parameters, configuration, argument ranges. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during a run (eigensolver, step-size underflow). Exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File system failure while writing outputs. Exit code 1.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace finitebath
