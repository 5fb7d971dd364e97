#pragma once

#include <stdexcept>
#include <string>

namespace divmbest {

// Root of every domain error raised by the library. The CLI maps each
// subclass to its own message prefix.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidModel : public Error {
public:
    using Error::Error;
};

class InvalidLabeling : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotIntegral : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class StateSpaceTooLarge : public Error {
public:
    using Error::Error;
};

class Unsatisfiable : public Error {
public:
    using Error::Error;
};

// Raised when a solver is applied outside the model class it is exact for
// (cycles for the tree solver, multi-label or non-submodular input for graph
// cuts, non-metric tables for expansion moves).
class SolverClassError : public Error {
public:
    using Error::Error;
};

class NotATree : public SolverClassError {
public:
    using SolverClassError::SolverClassError;
};

class NotSubmodular : public SolverClassError {
public:
    using SolverClassError::SolverClassError;
};

class NotBinary : public SolverClassError {
public:
    using SolverClassError::SolverClassError;
};

class NonMetric : public SolverClassError {
public:
    using SolverClassError::SolverClassError;
};

class SolverFailure : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace divmbest
