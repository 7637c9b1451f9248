#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltvprop/series.hpp"

namespace ltvprop {

/// Forced first-order linear system dU/dx = A(x) U + forcing(x), U(x_lo) = initial.
struct LinearIvp {
    CoeffMatrix A;        // n x n
    CoeffMatrix forcing;  // n x 1
    Matrix initial;       // n x 1
    Grid grid;
};

/// Two-sided linear system dU/dx = A(x) U + U B(x) + P(x), U(x_lo) = U0.
struct SylvesterIvp {
    CoeffMatrix A;  // n x n
    CoeffMatrix B;  // m x m
    CoeffMatrix P;  // n x m
    Matrix U0;      // n x m
    Grid grid;
};

/// Matrix Riccati equation dW/dx + W P W + W B - A W - Q = 0, W(x_lo) = W0.
struct RiccatiProblem {
    CoeffMatrix A;  // n x n
    CoeffMatrix B;  // m x m
    CoeffMatrix P;  // m x n
    CoeffMatrix Q;  // n x m
    Matrix W0;      // n x m
    Grid grid;
};

struct PropagatorStats {
    std::string label;
    int terms_used = 0;
    double last_term_norm = 0.0;
    double tail_bound = 0.0;
};

struct SolveMeta {
    std::vector<PropagatorStats> propagators;
    double max_residual = 0.0;
    std::optional<int> blow_up_node;
    std::optional<double> blow_up_x;
};

/// Per-node solution values. On finite escape the values stop at the last
/// node before the blow-up; the blow-up location lives in meta.
struct Solution {
    Grid grid;
    std::vector<Matrix> values;
    SolveMeta meta;
};

/// The two factors of the block linearization: W = W1 W2^{-1}. Both tables
/// cover every grid node (the factors stay finite through a blow-up; only
/// the quotient degenerates). W2 at the base node is the identity exactly.
struct RiccatiFactors {
    std::vector<Matrix> W1;  // n x m per node
    std::vector<Matrix> W2;  // m x m per node
    std::optional<int> blow_up_node;
};

/// Row-stack factors of the right-ordered form: W = U2^{-1} U1.
struct RiccatiFactorsF {
    std::vector<Matrix> U1;  // n x m per node
    std::vector<Matrix> U2;  // n x n per node
    std::optional<int> blow_up_node;
};

struct RiccatiBlockResult {
    Solution solution;
    RiccatiFactors factors;
};

struct RiccatiBlockResultF {
    Solution solution;
    RiccatiFactorsF factors;
};

/// Companion-form reduction of u^(n) + a_1 u^(n-1) + ... + a_n u = f.
/// The state is [u^(n-1), ..., u]; u0 supplies it at the grid base point in
/// that order, so the last solution component is u itself.
LinearIvp companion_from_scalar(const std::vector<Expr>& a, const Expr& f,
                                const std::vector<double>& u0, const Grid& grid);

/// U = E[A] (initial + integral of F[-A] forcing).
Solution solve_linear_ivp(const LinearIvp& p, const SeriesConfig& cfg);

/// U = E[A] (integral of F[-A] P E[-B] + U0) F[B].
Solution solve_sylvester(const SylvesterIvp& p, const SeriesConfig& cfg);

/// Block linearization through E of [[A, Q], [P, B]] applied to [W0; I].
/// Finite escape (|det W2| below threshold) is reported, not thrown: the
/// solution carries every node before the blow-up.
RiccatiBlockResult solve_riccati_block_E(const RiccatiProblem& p, const SeriesConfig& cfg);

/// Equivalent right-ordered form: [U1, U2] = [W0, I] F of [[-B, P], [Q, -A]],
/// W = U2^{-1} U1, blow-up keyed on det U2.
RiccatiBlockResultF solve_riccati_block_F(const RiccatiProblem& p, const SeriesConfig& cfg);

/// Composition through the particular solution Y (the W0 = 0 solution):
/// W = Y + E(A - YP) W0 [I + (integral R) W0]^{-1} F(-[B + PY]) with
/// R = F(-[B + PY]) P E(A - YP). A blow-up of Y itself aborts with
/// BlowUpError; a singular bracket is reported like the block forms.
Solution riccati_from_particular(const RiccatiProblem& p, const SeriesConfig& cfg);

/// Scalar Riccati dy/dx + a(x) y^2 + b(x) y + c(x) = 0 via the 1x1 embedding
/// P = a, B = b, A = 0, Q = -c.
Solution scalar_riccati(const Expr& a, const Expr& b, const Expr& c, double y0,
                        const Grid& grid, const SeriesConfig& cfg);

}  // namespace ltvprop
