#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

// Malformed configuration or insufficient input (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Argument at a genuine singularity (e.g. K_nu at z = 0).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

// Quadrature or eigensolver failure (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Discretization too coarse for the requested parameters.
class RefinementRequired : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace reslab
