#pragma once

#include "ltvprop/solvers.hpp"

namespace ltvprop {

struct OracleConfig {
    double step = 1e-4;          // target substep, shrunk to divide the grid spacing
    double blow_up_guard = 1e8;  // abort once any |entry| exceeds this
};

/// Classical fixed-step RK4 on dU/dx = A(x) U + forcing(x), sampled onto the
/// problem grid. Coefficients are evaluated from their expressions at the
/// half-steps, independent of the series engine's discretization.
/// Exceeding the guard raises DivergenceError (a bounded linear system
/// cannot escape in finite time; the guard only trips on bad input).
Solution rk4_linear(const LinearIvp& p, const OracleConfig& cfg);

/// RK4 directly on the nonlinear right-hand side
/// dW/dx = A W + Q - W P W - W B. Guard excess is genuine finite escape and
/// is recorded as the solution's blow-up location, mirroring the solvers.
Solution rk4_riccati(const RiccatiProblem& p, const OracleConfig& cfg);

/// Sup over common nodes of the max-abs difference, restricted to nodes
/// before either blow-up. Grids must match.
double compare(const Solution& a, const Solution& b);

}  // namespace ltvprop
