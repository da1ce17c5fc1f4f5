#pragma once

#include <stdexcept>
#include <string>

namespace surfflow {

// Each class maps onto one CLI exit code (see driver.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class BlowUpError : public Error {
public:
    using Error::Error;
};

// Harmonic candidates stayed rank deficient after every redraw.
class LinearDependenceError : public SolverError {
public:
    using SolverError::SolverError;
};

} // namespace surfflow
