#include "ltvprop/series.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ltvprop {

namespace {

std::vector<Matrix> sample_nodes(const CoeffMatrix& X, const Grid& grid) {
    if (!X.domain().contains(grid.lo()) || !X.domain().contains(grid.hi())) {
        throw InvalidArgumentError(
            "grid [" + std::to_string(grid.lo()) + ", " + std::to_string(grid.hi()) +
            "] not inside coefficient domain [" + std::to_string(X.domain().lo) + ", " +
            std::to_string(X.domain().hi) + "]");
    }
    std::vector<Matrix> samples;
    samples.reserve(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) samples.push_back(X.eval_at(grid.node(i)));
    return samples;
}

PropagatorTable accumulate(PropagatorKind kind, const std::vector<Matrix>& X_nodes,
                           const Grid& grid, const SeriesConfig& cfg, double bound_M) {
    if (static_cast<int>(X_nodes.size()) != grid.n_nodes())
        throw DimensionError("expected one coefficient sample per node, got " +
                             std::to_string(X_nodes.size()) + " for " +
                             std::to_string(grid.n_nodes()) + " nodes");
    if (!X_nodes[0].square())
        throw DimensionError("propagator coefficient must be square, got " +
                             std::to_string(X_nodes[0].rows()) + "x" +
                             std::to_string(X_nodes[0].cols()));
    if (cfg.max_terms < 1) throw InvalidArgumentError("max_terms must be positive");
    if (!(cfg.term_tol > 0.0)) throw InvalidArgumentError("term_tol must be positive");

    const int n = X_nodes[0].rows();
    const int nodes = grid.n_nodes();

    std::vector<Matrix> sum(nodes, Matrix::identity(n));
    std::vector<Matrix> term(nodes, Matrix::identity(n));
    std::vector<Matrix> integrand(nodes, Matrix(n, n));

    int terms_used = 0;
    double last_term_norm = 0.0;
    bool converged = false;
    for (int k = 1; k <= cfg.max_terms; ++k) {
        for (int i = 0; i < nodes; ++i) {
            integrand[i] = (kind == PropagatorKind::E) ? X_nodes[i] * term[i]
                                                       : term[i] * X_nodes[i];
        }
        term = cumulative_integral(integrand, grid);
        last_term_norm = 0.0;
        for (int i = 0; i < nodes; ++i) {
            sum[i] += term[i];
            last_term_norm = std::max(last_term_norm, norm_max(term[i]));
        }
        terms_used = k;
        if (last_term_norm < cfg.term_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw TruncationError("series did not converge: last term norm " +
                                  std::to_string(last_term_norm) + " >= tolerance " +
                                  std::to_string(cfg.term_tol) + " after " +
                                  std::to_string(cfg.max_terms) + " terms",
                              last_term_norm, cfg.term_tol, cfg.max_terms);
    }

    // Abel identity forces det = exp(integral of the trace) > 0; anything
    // else means the quadrature broke down.
    for (int i = 0; i < nodes; ++i) {
        if (!(det(sum[i]) > 1e-300)) {
            throw ConsistencyError("propagator determinant not strictly positive at node " +
                                   std::to_string(i));
        }
    }

    PropagatorTable table{kind, std::move(sum), terms_used, last_term_norm, 0.0};
    // Bound covers the last summed term and everything beyond it, so an
    // honest M guarantees last_term_norm <= tail_bound.
    table.tail_bound = tail_bound(bound_M, n, grid.length(), terms_used - 1);
    return table;
}

double sampled_bound(const std::vector<Matrix>& X_nodes) {
    double sup = 0.0;
    for (const Matrix& m : X_nodes) sup = std::max(sup, norm_max(m));
    return 1.25 * sup;
}

double expression_bound(const CoeffMatrix& X, const Grid& grid) {
    const BoundReport report = bound_estimate(X, std::max(101, grid.n_nodes()));
    if (report.offending_point) {
        throw EvalDomainError("coefficient matrix non-finite at x=" +
                                  std::to_string(*report.offending_point),
                              *report.offending_point, "");
    }
    return report.M;
}

}  // namespace

Grid::Grid(double x_lo, double x_hi, int n_intervals)
    : lo_(x_lo), hi_(x_hi), n_(n_intervals) {
    if (!(std::isfinite(x_lo) && std::isfinite(x_hi)))
        throw NonFiniteError("grid endpoints must be finite");
    if (!(x_lo < x_hi))
        throw InvalidArgumentError("grid requires x_lo < x_hi, got [" + std::to_string(x_lo) +
                                   ", " + std::to_string(x_hi) + "]");
    if (n_intervals <= 0 || n_intervals % 2 != 0)
        throw InvalidArgumentError("n_intervals must be a positive even integer, got " +
                                   std::to_string(n_intervals));
    h_ = (hi_ - lo_) / n_;
}

std::vector<Matrix> cumulative_integral(const std::vector<Matrix>& samples, const Grid& grid) {
    const int N = grid.n_intervals();
    if (static_cast<int>(samples.size()) != N + 1)
        throw DimensionError("expected " + std::to_string(N + 1) + " samples, got " +
                             std::to_string(samples.size()));
    const int rows = samples[0].rows();
    const int cols = samples[0].cols();
    for (const Matrix& m : samples) {
        if (m.rows() != rows || m.cols() != cols)
            throw DimensionError("integrand samples have mixed shapes");
    }

    const double h = grid.spacing();
    std::vector<Matrix> out(samples.size(), Matrix(rows, cols));
    for (int i = 2; i <= N; i += 2)
        out[i] = out[i - 2] + (h / 3.0) * (samples[i - 2] + 4.0 * samples[i - 1] + samples[i]);
    for (int i = 1; i <= N - 1; i += 2)
        out[i] = out[i - 1] + (h / 12.0) * (5.0 * samples[i - 1] + 8.0 * samples[i] - samples[i + 1]);
    return out;
}

PropagatorTable compute_E(const CoeffMatrix& X, const Grid& grid, const SeriesConfig& cfg) {
    return accumulate(PropagatorKind::E, sample_nodes(X, grid), grid, cfg,
                      expression_bound(X, grid));
}

PropagatorTable compute_F(const CoeffMatrix& X, const Grid& grid, const SeriesConfig& cfg) {
    return accumulate(PropagatorKind::F, sample_nodes(X, grid), grid, cfg,
                      expression_bound(X, grid));
}

PropagatorTable compute_E_sampled(const std::vector<Matrix>& X_nodes, const Grid& grid,
                                  const SeriesConfig& cfg) {
    return accumulate(PropagatorKind::E, X_nodes, grid, cfg, sampled_bound(X_nodes));
}

PropagatorTable compute_F_sampled(const std::vector<Matrix>& X_nodes, const Grid& grid,
                                  const SeriesConfig& cfg) {
    return accumulate(PropagatorKind::F, X_nodes, grid, cfg, sampled_bound(X_nodes));
}

double tail_bound(double M, int n, double x, int terms_summed) {
    if (M < 0.0 || n < 1 || x < 0.0 || terms_summed < 0)
        throw InvalidArgumentError("tail_bound requires M >= 0, n >= 1, x >= 0, K >= 0");
    const double z = n * M * x;
    if (z == 0.0) return 0.0;

    // (1/n) (e^z - sum_{k<=K} z^k/k!) summed forward from k = K+1; direct
    // subtraction would lose the tail to cancellation once it is below eps*e^z.
    double term = 1.0;
    double sum = 0.0;
    int k = 0;
    while (true) {
        ++k;
        term *= z / k;
        if (std::isinf(term)) return term;  // bound overflowed; still a bound
        if (k > terms_summed) {
            sum += term;
            if (term == 0.0 || (k > z && term < sum * 1e-17)) break;
        }
    }
    return sum / n;
}

namespace {

double residual_impl(const PropagatorTable& table, const std::vector<Matrix>& X_nodes,
                     const Grid& grid) {
    if (static_cast<int>(table.values.size()) != grid.n_nodes())
        throw DimensionError("table was not computed on this grid");
    const double inv2h = 1.0 / (2.0 * grid.spacing());
    double res = 0.0;
    for (int i = 1; i < grid.n_nodes() - 1; ++i) {
        const Matrix deriv = (table.values[i + 1] - table.values[i - 1]) * inv2h;
        const Matrix defect = (table.kind == PropagatorKind::E)
                                  ? deriv - X_nodes[i] * table.values[i]
                                  : deriv - table.values[i] * X_nodes[i];
        res = std::max(res, norm_max(defect));
    }
    return res;
}

}  // namespace

double propagator_residual(const PropagatorTable& table, const CoeffMatrix& X, const Grid& grid) {
    return residual_impl(table, sample_nodes(X, grid), grid);
}

double propagator_residual_sampled(const PropagatorTable& table,
                                   const std::vector<Matrix>& X_nodes, const Grid& grid) {
    return residual_impl(table, X_nodes, grid);
}

}  // namespace ltvprop
