#include "ltvprop/solvers.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ltvprop {

namespace {

// |det| of a degenerating factor below this flags finite escape. The factor
// starts at the identity (det exactly 1), so the threshold is absolute.
constexpr double kBlowUpTol = 1e-10;

std::vector<Matrix> sample(const CoeffMatrix& c, const Grid& grid) {
    std::vector<Matrix> out;
    out.reserve(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) out.push_back(c.eval_at(grid.node(i)));
    return out;
}

void require_shape(const CoeffMatrix& c, int rows, int cols, const char* name) {
    if (c.rows() != rows || c.cols() != cols) {
        throw DimensionError(std::string(name) + " must be " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", got " + std::to_string(c.rows()) + "x" +
                             std::to_string(c.cols()));
    }
}

void require_shape(const Matrix& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        throw DimensionError(std::string(name) + " must be " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
}

PropagatorStats stats_of(const std::string& label, const PropagatorTable& t) {
    return {label, t.terms_used, t.last_term_norm, t.tail_bound};
}

}  // namespace

LinearIvp companion_from_scalar(const std::vector<Expr>& a, const Expr& f,
                                const std::vector<double>& u0, const Grid& grid) {
    const int n = static_cast<int>(a.size());
    if (n < 1) throw InvalidArgumentError("companion form needs at least one coefficient");
    if (static_cast<int>(u0.size()) != n)
        throw DimensionError("expected " + std::to_string(n) + " initial values, got " +
                             std::to_string(u0.size()));

    const Interval domain(grid.lo(), grid.hi());
    const Expr zero = Expr::number(0.0);
    const Expr one = Expr::number(1.0);

    std::vector<Expr> entries(static_cast<std::size_t>(n) * n, zero);
    for (int j = 0; j < n; ++j) entries[j] = Expr::negate(a[j]);
    for (int i = 1; i < n; ++i) entries[static_cast<std::size_t>(i) * n + (i - 1)] = one;
    CoeffMatrix A(n, n, std::move(entries), domain);

    std::vector<Expr> force(static_cast<std::size_t>(n), zero);
    force[0] = f.valid() ? f : zero;
    CoeffMatrix forcing(n, 1, std::move(force), domain);

    Matrix initial(n, 1, std::vector<double>(u0.begin(), u0.end()));
    return LinearIvp{std::move(A), std::move(forcing), std::move(initial), grid};
}

Solution solve_linear_ivp(const LinearIvp& p, const SeriesConfig& cfg) {
    if (!p.A.square()) throw DimensionError("A must be square");
    const int n = p.A.rows();
    require_shape(p.forcing, n, 1, "forcing");
    require_shape(p.initial, n, 1, "initial value");

    const PropagatorTable E_A = compute_E(p.A, p.grid, cfg);
    const PropagatorTable F_mA = compute_F(p.A.negated(), p.grid, cfg);

    const std::vector<Matrix> force = sample(p.forcing, p.grid);
    std::vector<Matrix> integrand(force.size(), Matrix(n, 1));
    for (std::size_t i = 0; i < force.size(); ++i) integrand[i] = F_mA.values[i] * force[i];
    const std::vector<Matrix> particular = cumulative_integral(integrand, p.grid);

    Solution s{p.grid, {}, {}};
    s.values.reserve(p.grid.n_nodes());
    for (int i = 0; i < p.grid.n_nodes(); ++i)
        s.values.push_back(E_A.values[i] * (p.initial + particular[i]));

    const std::vector<Matrix> As = sample(p.A, p.grid);
    const double inv2h = 1.0 / (2.0 * p.grid.spacing());
    double res = 0.0;
    for (int i = 1; i < p.grid.n_nodes() - 1; ++i) {
        const Matrix deriv = (s.values[i + 1] - s.values[i - 1]) * inv2h;
        res = std::max(res, norm_max(deriv - (As[i] * s.values[i] + force[i])));
    }
    s.meta.max_residual = res;
    s.meta.propagators = {stats_of("E[A]", E_A), stats_of("F[-A]", F_mA)};
    return s;
}

Solution solve_sylvester(const SylvesterIvp& p, const SeriesConfig& cfg) {
    if (!p.A.square()) throw DimensionError("A must be square");
    if (!p.B.square()) throw DimensionError("B must be square");
    const int n = p.A.rows();
    const int m = p.B.rows();
    require_shape(p.P, n, m, "P");
    require_shape(p.U0, n, m, "U0");

    const PropagatorTable E_A = compute_E(p.A, p.grid, cfg);
    const PropagatorTable F_mA = compute_F(p.A.negated(), p.grid, cfg);
    const PropagatorTable E_mB = compute_E(p.B.negated(), p.grid, cfg);
    const PropagatorTable F_B = compute_F(p.B, p.grid, cfg);

    const std::vector<Matrix> Ps = sample(p.P, p.grid);
    std::vector<Matrix> integrand(Ps.size(), Matrix(n, m));
    for (std::size_t i = 0; i < Ps.size(); ++i)
        integrand[i] = F_mA.values[i] * Ps[i] * E_mB.values[i];
    const std::vector<Matrix> inner = cumulative_integral(integrand, p.grid);

    Solution s{p.grid, {}, {}};
    s.values.reserve(p.grid.n_nodes());
    for (int i = 0; i < p.grid.n_nodes(); ++i)
        s.values.push_back(E_A.values[i] * (inner[i] + p.U0) * F_B.values[i]);

    s.meta.propagators = {stats_of("E[A]", E_A), stats_of("F[-A]", F_mA),
                          stats_of("E[-B]", E_mB), stats_of("F[B]", F_B)};

    const std::vector<Matrix> As = sample(p.A, p.grid);
    const std::vector<Matrix> Bs = sample(p.B, p.grid);
    const double inv2h = 1.0 / (2.0 * p.grid.spacing());
    double res = 0.0;
    for (int i = 1; i < p.grid.n_nodes() - 1; ++i) {
        const Matrix deriv = (s.values[i + 1] - s.values[i - 1]) * inv2h;
        res = std::max(res, norm_max(deriv - (As[i] * s.values[i] + s.values[i] * Bs[i] + Ps[i])));
    }
    s.meta.max_residual = res;
    return s;
}

namespace {

void validate_riccati(const RiccatiProblem& p, int& n, int& m) {
    if (!p.A.square()) throw DimensionError("A must be square");
    if (!p.B.square()) throw DimensionError("B must be square");
    n = p.A.rows();
    m = p.B.rows();
    require_shape(p.P, m, n, "P");
    require_shape(p.Q, n, m, "Q");
    require_shape(p.W0, n, m, "W0");
}

}  // namespace

RiccatiBlockResult solve_riccati_block_E(const RiccatiProblem& p, const SeriesConfig& cfg) {
    int n = 0, m = 0;
    validate_riccati(p, n, m);

    const CoeffMatrix Z = CoeffMatrix::block2x2(p.A, p.Q, p.P, p.B);
    const PropagatorTable EZ = compute_E(Z, p.grid, cfg);
    const Matrix stack0 = vstack(p.W0, Matrix::identity(m));

    RiccatiFactors factors;
    factors.W1.reserve(p.grid.n_nodes());
    factors.W2.reserve(p.grid.n_nodes());
    for (int i = 0; i < p.grid.n_nodes(); ++i) {
        const Matrix stacked = EZ.values[i] * stack0;
        factors.W1.push_back(stacked.block(0, 0, n, m));
        factors.W2.push_back(stacked.block(n, 0, m, m));
    }

    Solution s{p.grid, {}, {}};
    s.meta.propagators = {stats_of("E[[A,Q],[P,B]]", EZ)};
    s.meta.max_residual = propagator_residual(EZ, Z, p.grid);
    for (int i = 0; i < p.grid.n_nodes(); ++i) {
        if (std::fabs(det(factors.W2[i])) < kBlowUpTol) {
            factors.blow_up_node = i;
            break;
        }
        try {
            s.values.push_back(factors.W1[i] * inverse(factors.W2[i]));
        } catch (const SingularMatrixError&) {
            factors.blow_up_node = i;
            break;
        }
    }
    if (factors.blow_up_node) {
        s.meta.blow_up_node = factors.blow_up_node;
        s.meta.blow_up_x = p.grid.node(*factors.blow_up_node);
    }
    return {std::move(s), std::move(factors)};
}

RiccatiBlockResultF solve_riccati_block_F(const RiccatiProblem& p, const SeriesConfig& cfg) {
    int n = 0, m = 0;
    validate_riccati(p, n, m);

    const CoeffMatrix Z = CoeffMatrix::block2x2(p.B.negated(), p.P, p.Q, p.A.negated());
    const PropagatorTable FZ = compute_F(Z, p.grid, cfg);
    const Matrix init = hstack(p.W0, Matrix::identity(n));

    RiccatiFactorsF factors;
    factors.U1.reserve(p.grid.n_nodes());
    factors.U2.reserve(p.grid.n_nodes());
    for (int i = 0; i < p.grid.n_nodes(); ++i) {
        const Matrix row = init * FZ.values[i];
        factors.U1.push_back(row.block(0, 0, n, m));
        factors.U2.push_back(row.block(0, m, n, n));
    }

    Solution s{p.grid, {}, {}};
    s.meta.propagators = {stats_of("F[[-B,P],[Q,-A]]", FZ)};
    s.meta.max_residual = propagator_residual(FZ, Z, p.grid);
    for (int i = 0; i < p.grid.n_nodes(); ++i) {
        if (std::fabs(det(factors.U2[i])) < kBlowUpTol) {
            factors.blow_up_node = i;
            break;
        }
        try {
            s.values.push_back(inverse(factors.U2[i]) * factors.U1[i]);
        } catch (const SingularMatrixError&) {
            factors.blow_up_node = i;
            break;
        }
    }
    if (factors.blow_up_node) {
        s.meta.blow_up_node = factors.blow_up_node;
        s.meta.blow_up_x = p.grid.node(*factors.blow_up_node);
    }
    return {std::move(s), std::move(factors)};
}

Solution riccati_from_particular(const RiccatiProblem& p, const SeriesConfig& cfg) {
    int n = 0, m = 0;
    validate_riccati(p, n, m);

    RiccatiProblem zero_start = p;
    zero_start.W0 = Matrix(n, m);
    const RiccatiBlockResult y = solve_riccati_block_E(zero_start, cfg);
    if (y.solution.meta.blow_up_node) {
        throw BlowUpError("particular solution escapes at x=" +
                              std::to_string(*y.solution.meta.blow_up_x),
                          *y.solution.meta.blow_up_node, *y.solution.meta.blow_up_x);
    }
    const std::vector<Matrix>& Y = y.solution.values;

    // The derived coefficients involve Y, which exists only on the grid, so
    // their propagators run on node samples.
    const std::vector<Matrix> As = sample(p.A, p.grid);
    const std::vector<Matrix> Bs = sample(p.B, p.grid);
    const std::vector<Matrix> Ps = sample(p.P, p.grid);
    const int nodes = p.grid.n_nodes();
    std::vector<Matrix> AmYP(nodes, Matrix(n, n));
    std::vector<Matrix> negBpPY(nodes, Matrix(m, m));
    for (int i = 0; i < nodes; ++i) {
        AmYP[i] = As[i] - Y[i] * Ps[i];
        negBpPY[i] = -(Bs[i] + Ps[i] * Y[i]);
    }

    const PropagatorTable Eleft = compute_E_sampled(AmYP, p.grid, cfg);
    const PropagatorTable Fright = compute_F_sampled(negBpPY, p.grid, cfg);

    std::vector<Matrix> R(nodes, Matrix(m, n));
    for (int i = 0; i < nodes; ++i) R[i] = Fright.values[i] * Ps[i] * Eleft.values[i];
    const std::vector<Matrix> intR = cumulative_integral(R, p.grid);

    Solution s{p.grid, {}, {}};
    s.meta.propagators = y.solution.meta.propagators;
    s.meta.propagators.push_back(stats_of("E[A-YP]", Eleft));
    s.meta.propagators.push_back(stats_of("F[-(B+PY)]", Fright));
    s.meta.max_residual = std::max({y.solution.meta.max_residual,
                                    propagator_residual_sampled(Eleft, AmYP, p.grid),
                                    propagator_residual_sampled(Fright, negBpPY, p.grid)});

    const Matrix I_m = Matrix::identity(m);
    for (int i = 0; i < nodes; ++i) {
        const Matrix bracket = I_m + intR[i] * p.W0;
        if (std::fabs(det(bracket)) < kBlowUpTol) {
            s.meta.blow_up_node = i;
            s.meta.blow_up_x = p.grid.node(i);
            break;
        }
        try {
            s.values.push_back(Y[i] + Eleft.values[i] * p.W0 * inverse(bracket) * Fright.values[i]);
        } catch (const SingularMatrixError&) {
            s.meta.blow_up_node = i;
            s.meta.blow_up_x = p.grid.node(i);
            break;
        }
    }
    return s;
}

Solution scalar_riccati(const Expr& a, const Expr& b, const Expr& c, double y0,
                        const Grid& grid, const SeriesConfig& cfg) {
    const Interval domain(grid.lo(), grid.hi());
    const RiccatiProblem p{
        CoeffMatrix::zero(1, 1, domain),
        CoeffMatrix(1, 1, {b}, domain),
        CoeffMatrix(1, 1, {a}, domain),
        CoeffMatrix(1, 1, {Expr::negate(c)}, domain),
        Matrix(1, 1, {y0}),
        grid,
    };
    return solve_riccati_block_E(p, cfg).solution;
}

}  // namespace ltvprop
