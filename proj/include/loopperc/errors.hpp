#pragma once

#include <stdexcept>
#include <string>

namespace loopperc {

// Out-of-range or otherwise invalid numeric/structural input.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Vertex or edge not present in the tree it was looked up in.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Loop tracing was asked to start exactly on a link time.
class DegenerateStart : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Series evaluation could not meet its tail tolerance.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Diagnostics raised by the estimators. They are legal outcomes of a run
// (the CLI maps them to exit status 3), not programming errors.
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoTransition : public DiagnosticError {
public:
    using DiagnosticError::DiagnosticError;
};

class DegenerateSample : public DiagnosticError {
public:
    using DiagnosticError::DiagnosticError;
};

class NonMonotone : public DiagnosticError {
public:
    using DiagnosticError::DiagnosticError;
};

} // namespace loopperc
