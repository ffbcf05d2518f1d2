#pragma once

#include <stdexcept>
#include <string>

namespace searcheq {

// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A demand primitive violates the maintained assumptions.
class InvalidDemand : public Error {
public:
    using Error::Error;
};

// A market, noisy-search or cost-distribution parameter is out of bounds.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

// An argument lies outside the domain of the function.
class DomainError : public Error {
public:
    using Error::Error;
};

// A root could not be bracketed or a solver did not converge.
class SolveFailure : public Error {
public:
    using Error::Error;
};

// Two equilibria that must share inputs were solved under different ones.
class ParameterMismatch : public Error {
public:
    using Error::Error;
};

// Malformed run, simulation or CLI configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace searcheq
