#pragma once

#include <stdexcept>
#include <string>

namespace ermakov {

/// Bad scenario / configuration / usage input. CLI exit code 1.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Runtime numerical failure (singularity, non-convergence, turning point).
/// CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition of an operation does not hold for the request
/// (e.g. reduction with C != 0 or nonzero frequency). CLI exit code 3.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ermakov
