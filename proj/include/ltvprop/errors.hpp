#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltvprop {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape mismatch between operands (message names both shapes).
struct DimensionError : Error {
    using Error::Error;
};

/// NaN/Inf rejected at construction time.
struct NonFiniteError : Error {
    using Error::Error;
};

/// Invalid argument values (odd interval count, probe count < 2, ...).
struct InvalidArgumentError : Error {
    using Error::Error;
};

/// Matrix singular to working precision.
struct SingularMatrixError : Error {
    SingularMatrixError(const std::string& msg, int pivot)
        : Error(msg), pivot_index(pivot) {}
    int pivot_index;
};

/// Expression syntax error with the byte offset of the failure.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t at, std::string what_expected)
        : Error(msg), offset(at), expected(std::move(what_expected)) {}
    std::size_t offset;
    std::string expected;
};

/// Non-finite value during expression evaluation.
struct EvalDomainError : Error {
    EvalDomainError(const std::string& msg, double at, std::string sub,
                    int r = -1, int c = -1)
        : Error(msg), x(at), subexpr(std::move(sub)), row(r), col(c) {}
    double x;
    std::string subexpr;
    int row;  // -1 when not tied to a matrix entry
    int col;
};

/// Series hit max_terms with the last term still above tolerance.
struct TruncationError : Error {
    TruncationError(const std::string& msg, double last, double tol, int terms)
        : Error(msg), last_term_norm(last), term_tol(tol), max_terms(terms) {}
    double last_term_norm;
    double term_tol;
    int max_terms;
};

/// Internal post-check failed (det of a propagator not strictly positive).
struct ConsistencyError : Error {
    using Error::Error;
};

/// Reference integrator exceeded its blow-up guard.
struct DivergenceError : Error {
    DivergenceError(const std::string& msg, double x)
        : Error(msg), last_x(x) {}
    double last_x;
};

/// A required particular solution escaped in finite time.
struct BlowUpError : Error {
    BlowUpError(const std::string& msg, int at_node, double at_x)
        : Error(msg), node(at_node), x(at_x) {}
    int node;
    double x;
};

/// Solutions on different grids cannot be compared.
struct GridMismatchError : Error {
    using Error::Error;
};

/// File system failure, message carries the path.
struct IoError : Error {
    using Error::Error;
};

}  // namespace ltvprop
