#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ltvprop/problem.hpp"

namespace ltvprop {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Outcome of the invariant suite for one problem. Every check appears with
/// an explicit pass/fail; nothing is silently skipped. Timing is kept out of
/// the serialized form so identical inputs produce identical report text.
struct Report {
    std::vector<CheckResult> checks;
    double elapsed_seconds = 0.0;

    void add(std::string name, double residual, double tol);
    bool all_pass() const;
    bool has(const std::string& name) const;
};

/// The checks verify_problem() always runs for a kind, regardless of the
/// problem data. Conditional checks (constant-coefficient reduction, grid
/// refinement, oracle agreement, blow-up consistency) are not listed.
std::vector<std::string> required_checks(ProblemKind kind);

/// Run the invariant suite: determinant identity, inverse identity,
/// derivative residuals, truncation honesty, base-point exactness, and the
/// kind-specific checks (solution residual, Riccati form equivalence and
/// bilinear identity, particular-vs-block agreement, oracle comparison).
Report verify_problem(const Problem& p);

/// One line per check: "INVARIANT <name> residual=<r> tol=<t> PASS|FAIL".
void write_report(const Report& report, std::ostream& out);

}  // namespace ltvprop
