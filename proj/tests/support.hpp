#pragma once

#include <cmath>
#include <random>

#include "ltvprop/expr.hpp"

namespace ltvprop::testing {

/// Random polynomial coefficient matrix: each entry c0 + c1 x + c2 x^2 with
/// coefficients uniform in [-scale, scale].
inline CoeffMatrix random_poly_coeff(std::mt19937& rng, int rows, int cols,
                                     const Interval& domain, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<Expr> entries;
    const Expr x = Expr::variable();
    for (int i = 0; i < rows * cols; ++i) {
        Expr e = Expr::number(0.0);
        for (int d = 0; d <= 2; ++d) {
            const double c = u(rng);
            Expr monomial = Expr::number(std::fabs(c));
            if (d >= 1) monomial = monomial * x;
            if (d == 2) monomial = monomial * x;
            e = c < 0 ? e - monomial : e + monomial;
        }
        entries.push_back(e);
    }
    return CoeffMatrix(rows, cols, std::move(entries), domain);
}

inline Matrix random_matrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

}  // namespace ltvprop::testing
