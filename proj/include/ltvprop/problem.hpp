#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ltvprop/oracle.hpp"
#include "ltvprop/solvers.hpp"

namespace ltvprop {

enum class ProblemKind {
    Propagator,
    Linear,
    NthOrder,
    Sylvester,
    Riccati,
    RiccatiParticular,
    ScalarRiccati,
};

std::string kind_name(ProblemKind kind);

/// A problem file, validated: shapes consistent with the kind, n_intervals
/// even, no unknown fields. Coefficients are expression strings in the file
/// and parsed trees here.
struct Problem {
    ProblemKind kind;
    Interval interval;
    int n_intervals = 200;
    SeriesConfig series;
    bool oracle = false;

    // propagator
    std::optional<CoeffMatrix> X;
    // linear / sylvester / riccati coefficient roles
    std::optional<CoeffMatrix> A, B, P, Q, forcing;
    std::optional<Matrix> initial;  // C, U0 or W0 depending on kind
    // nth-order
    std::vector<Expr> a;
    Expr f;
    std::vector<double> u0;
    // scalar riccati
    Expr sa, sb, sc;
    double y0 = 0.0;

    Grid grid() const { return Grid(interval.lo, interval.hi, n_intervals); }

    LinearIvp linear_ivp() const;        // Linear and NthOrder kinds
    SylvesterIvp sylvester_ivp() const;  // Sylvester kind
    RiccatiProblem riccati() const;      // Riccati kinds (ScalarRiccati embedded 1x1)
};

/// Parse problem JSON text. Unknown fields, shape inconsistencies and odd
/// n_intervals are rejected with InvalidArgumentError; expression syntax
/// errors propagate as ParseError.
Problem parse_problem(const std::string& json_text);

/// Load and parse a problem file; file system failures raise IoError.
Problem load_problem(const std::filesystem::path& path);

}  // namespace ltvprop
