#include "ltvprop/oracle.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ltvprop {

namespace {

bool within_guard(const Matrix& m, double guard) {
    for (double v : m.entries())
        if (!std::isfinite(v) || std::fabs(v) > guard) return false;
    return true;
}

int substeps_per_interval(const Grid& grid, double step) {
    if (!(step > 0.0)) throw InvalidArgumentError("oracle step must be positive");
    return std::max(1, static_cast<int>(std::ceil(grid.spacing() / step - 1e-9)));
}

// One classical RK4 step; Rhs is state x time -> derivative.
template <typename Rhs>
Matrix rk4_step(const Rhs& rhs, const Matrix& u, double x, double h) {
    const Matrix k1 = rhs(x, u);
    const Matrix k2 = rhs(x + h / 2.0, u + (h / 2.0) * k1);
    const Matrix k3 = rhs(x + h / 2.0, u + (h / 2.0) * k2);
    const Matrix k4 = rhs(x + h, u + h * k3);
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Solution rk4_linear(const LinearIvp& p, const OracleConfig& cfg) {
    if (!p.A.square()) throw DimensionError("A must be square");
    const int sub = substeps_per_interval(p.grid, cfg.step);
    const double hs = p.grid.spacing() / sub;

    const auto rhs = [&](double x, const Matrix& u) {
        return p.A.eval_at(x) * u + p.forcing.eval_at(x);
    };

    Solution s{p.grid, {}, {}};
    Matrix u = p.initial;
    s.values.push_back(u);
    for (int i = 0; i < p.grid.n_intervals(); ++i) {
        const double x0 = p.grid.node(i);
        for (int k = 0; k < sub; ++k) {
            const double x = x0 + k * hs;
            u = rk4_step(rhs, u, x, hs);
            if (!within_guard(u, cfg.blow_up_guard)) {
                throw DivergenceError("linear oracle exceeded guard near x=" +
                                          std::to_string(x + hs),
                                      x);
            }
        }
        s.values.push_back(u);
    }
    return s;
}

Solution rk4_riccati(const RiccatiProblem& p, const OracleConfig& cfg) {
    if (!p.A.square() || !p.B.square()) throw DimensionError("A and B must be square");
    const int sub = substeps_per_interval(p.grid, cfg.step);
    const double hs = p.grid.spacing() / sub;

    const auto rhs = [&](double x, const Matrix& w) {
        const Matrix Pw = p.P.eval_at(x);
        return p.A.eval_at(x) * w + p.Q.eval_at(x) - w * Pw * w - w * p.B.eval_at(x);
    };

    Solution s{p.grid, {}, {}};
    Matrix w = p.W0;
    s.values.push_back(w);
    for (int i = 0; i < p.grid.n_intervals(); ++i) {
        const double x0 = p.grid.node(i);
        bool escaped = false;
        for (int k = 0; k < sub; ++k) {
            // Escaping entries pass through inf/NaN inside the stages; the
            // arithmetic lets them propagate and the guard catches them here.
            const Matrix next = rk4_step(rhs, w, x0 + k * hs, hs);
            if (!within_guard(next, cfg.blow_up_guard)) {
                escaped = true;
                break;
            }
            w = next;
        }
        if (escaped) {
            // First grid node the integration failed to reach.
            s.meta.blow_up_node = i + 1;
            s.meta.blow_up_x = p.grid.node(i + 1);
            break;
        }
        s.values.push_back(w);
    }
    return s;
}

double compare(const Solution& a, const Solution& b) {
    if (!(a.grid == b.grid)) throw GridMismatchError("solutions computed on different grids");
    const std::size_t common = std::min(a.values.size(), b.values.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < common; ++i) sup = std::max(sup, norm_max(a.values[i] - b.values[i]));
    return sup;
}

}  // namespace ltvprop
