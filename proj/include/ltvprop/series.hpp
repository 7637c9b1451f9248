#pragma once

#include <vector>

#include "ltvprop/expr.hpp"
#include "ltvprop/matrix.hpp"

namespace ltvprop {

/// Uniform grid on [x_lo, x_hi]. The interval count must be even: the
/// cumulative Simpson rule consumes nodes in pairs.
class Grid {
public:
    Grid(double x_lo, double x_hi, int n_intervals);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int n_intervals() const { return n_; }
    int n_nodes() const { return n_ + 1; }
    double spacing() const { return h_; }
    double node(int i) const { return i == n_ ? hi_ : lo_ + i * h_; }
    double length() const { return hi_ - lo_; }

    bool operator==(const Grid&) const = default;

private:
    double lo_;
    double hi_;
    int n_;
    double h_;
};

struct SeriesConfig {
    int max_terms = 40;
    double term_tol = 1e-13;
};

enum class PropagatorKind { E, F };

/// One matrix per grid node plus truncation diagnostics. values[0] is the
/// identity exactly; every value has strictly positive determinant (checked
/// at construction, a violation means the quadrature broke down).
struct PropagatorTable {
    PropagatorKind kind;
    std::vector<Matrix> values;
    int terms_used = 0;
    double last_term_norm = 0.0;
    double tail_bound = 0.0;
};

/// Cumulative integral of node samples: result[i] approximates the integral
/// from the grid base to node i, result[0] = 0. Even nodes use composite
/// Simpson over pairs; odd nodes add the 3-point increment
/// (h/12)(5 f[i-1] + 8 f[i] - f[i+1]). Globally O(h^4) for smooth samples.
std::vector<Matrix> cumulative_integral(const std::vector<Matrix>& samples, const Grid& grid);

/// Left-ordered series: fundamental solution of dY/dx = X(x) Y, Y(x_lo) = I,
/// accumulated through the term recurrence T_{k+1} = integral of X T_k.
PropagatorTable compute_E(const CoeffMatrix& X, const Grid& grid, const SeriesConfig& cfg);

/// Right-ordered series: fundamental solution of dY/dx = Y X(x).
PropagatorTable compute_F(const CoeffMatrix& X, const Grid& grid, const SeriesConfig& cfg);

/// Same recurrences on coefficients known only as per-node samples (used when
/// a coefficient is itself a computed solution and has no expression form).
PropagatorTable compute_E_sampled(const std::vector<Matrix>& X_nodes, const Grid& grid,
                                  const SeriesConfig& cfg);
PropagatorTable compute_F_sampled(const std::vector<Matrix>& X_nodes, const Grid& grid,
                                  const SeriesConfig& cfg);

/// Bound on the series remainder after the first K terms:
/// (1/n) * sum_{k>K} (n M x)^k / k!. Summed forward from the tail so the
/// result stays accurate when it is far below the full exponential.
double tail_bound(double M, int n, double x, int terms_summed);

/// Max over interior nodes of the centered-difference defect
/// dV/dx - X V (kind E) or dV/dx - V X (kind F); the primary self-check.
/// Second-order in the grid spacing regardless of table accuracy.
double propagator_residual(const PropagatorTable& table, const CoeffMatrix& X, const Grid& grid);
double propagator_residual_sampled(const PropagatorTable& table,
                                   const std::vector<Matrix>& X_nodes, const Grid& grid);

}  // namespace ltvprop
