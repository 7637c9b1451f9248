#include <doctest.h>

#include <cmath>
#include <random>

#include "ltvprop/series.hpp"

using namespace ltvprop;

namespace {

std::vector<Matrix> scalar_samples(const Grid& g, double (*f)(double)) {
    std::vector<Matrix> out;
    for (int i = 0; i < g.n_nodes(); ++i) out.push_back(Matrix{{f(g.node(i))}});
    return out;
}

CoeffMatrix random_polynomial(std::mt19937& rng, int n, const Interval& domain) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Expr> entries;
    const Expr x = Expr::variable();
    for (int i = 0; i < n * n; ++i) {
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
    return CoeffMatrix(n, n, std::move(entries), domain);
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(0.0, 1.0, 3), InvalidArgumentError);   // odd
    CHECK_THROWS_AS(Grid(0.0, 1.0, 0), InvalidArgumentError);
    CHECK_THROWS_AS(Grid(1.0, 1.0, 10), InvalidArgumentError);  // empty interval
    const Grid g(0.5, 2.5, 10);
    CHECK(g.n_nodes() == 11);
    CHECK(g.node(0) == 0.5);
    CHECK(g.node(10) == 2.5);
    CHECK(g.spacing() == doctest::Approx(0.2));
}

TEST_CASE("cumulative integral is exact on low-degree polynomials") {
    const Grid g(0.0, 1.0, 10);

    const auto constant = cumulative_integral(scalar_samples(g, [](double) { return 1.0; }), g);
    CHECK(constant[0](0, 0) == 0.0);
    for (int i = 0; i <= 10; ++i)
        CHECK(constant[i](0, 0) == doctest::Approx(i / 10.0).epsilon(1e-15));

    const auto linear = cumulative_integral(scalar_samples(g, [](double x) { return x; }), g);
    CHECK(linear[10](0, 0) == doctest::Approx(0.5).epsilon(1e-15));

    const auto cubic = cumulative_integral(scalar_samples(g, [](double x) { return x * x * x; }), g);
    CHECK(cubic[10](0, 0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cumulative integral converges at fourth order") {
    // integral of cos from 0: sin(x), checked at the endpoint
    const auto run = [](int n) {
        const Grid g(0.0, 1.0, n);
        const auto table = cumulative_integral(scalar_samples(g, [](double x) { return std::cos(x); }), g);
        return std::fabs(table[n](0, 0) - std::sin(1.0));
    };
    const double e1 = run(20), e2 = run(40);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("compute_E zero generator") {
    const Grid g(0.0, 1.0, 10);
    const PropagatorTable t = compute_E(CoeffMatrix::zero(2, 2, Interval(0, 1)), g, {});
    CHECK(t.terms_used == 1);
    CHECK(t.last_term_norm == 0.0);
    for (const Matrix& v : t.values) CHECK(v == Matrix::identity(2));
}

TEST_CASE("compute_E nilpotent constant terminates after two terms") {
    const Grid g(0.0, 1.0, 10);
    const CoeffMatrix X = CoeffMatrix::from_strings({{"0", "1"}, {"0", "0"}}, Interval(0, 1));
    const PropagatorTable t = compute_E(X, g, {});
    CHECK(t.terms_used == 2);
    CHECK(t.last_term_norm == 0.0);
    for (int i = 0; i <= 10; ++i) {
        CHECK(norm_max(t.values[i] - Matrix{{1.0, g.node(i)}, {0.0, 1.0}}) <= 1e-14);
    }
}

TEST_CASE("scalar coefficient reduces to the classical exponential") {
    const Grid g(0.0, 1.0, 200);
    const CoeffMatrix X = CoeffMatrix::from_strings({{"2*x"}}, Interval(0, 1));
    const PropagatorTable E = compute_E(X, g, {});
    CHECK(std::fabs(E.values.back()(0, 0) - std::exp(1.0)) <= 1e-8);

    // 1x1 always commutes, so F is the identical table
    const PropagatorTable F = compute_F(X, g, {});
    for (int i = 0; i < g.n_nodes(); ++i) CHECK(E.values[i] == F.values[i]);
}

TEST_CASE("inverse identity for a non-commuting coefficient") {
    const Grid g(0.0, 1.0, 200);
    const CoeffMatrix X = CoeffMatrix::from_strings({{"0", "1"}, {"x", "0"}}, Interval(0, 1));
    const PropagatorTable F = compute_F(X, g, {});
    const PropagatorTable E_neg = compute_E(X.negated(), g, {});
    const Matrix I = Matrix::identity(2);
    for (int i = 0; i < g.n_nodes(); ++i) {
        CHECK(norm_max(F.values[i] * E_neg.values[i] - I) <= 1e-9);
    }
}

TEST_CASE("values at the base point are the identity exactly") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 4;
        const CoeffMatrix X = random_polynomial(rng, n, Interval(0, 1));
        const Grid g(0.0, 1.0, 50);
        CHECK(compute_E(X, g, {}).values[0] == Matrix::identity(n));
        CHECK(compute_F(X, g, {}).values[0] == Matrix::identity(n));
    }
}

TEST_CASE("inverse and determinant identities on random polynomial coefficients") {
    std::mt19937 rng(29);
    const Grid g(0.0, 1.0, 400);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + trial % 4;
        const CoeffMatrix X = random_polynomial(rng, n, Interval(0, 1));
        const PropagatorTable E = compute_E(X, g, {});
        const PropagatorTable F = compute_F(X, g, {});
        const PropagatorTable E_neg = compute_E(X.negated(), g, {});
        const Matrix I = Matrix::identity(n);

        std::vector<Matrix> tr;
        for (int i = 0; i < g.n_nodes(); ++i)
            tr.push_back(Matrix{{X.eval_at(g.node(i)).trace()}});
        const auto int_tr = cumulative_integral(tr, g);

        for (int i = 0; i < g.n_nodes(); ++i) {
            CHECK(norm_max(F.values[i] * E_neg.values[i] - I) <= 1e-8);
            CHECK(norm_max(E_neg.values[i] * F.values[i] - I) <= 1e-8);
            const double expected = std::exp(int_tr[i](0, 0));
            CHECK(std::fabs(det(E.values[i]) - expected) <= 1e-8 * expected);
            CHECK(std::fabs(det(F.values[i]) - expected) <= 1e-8 * expected);
        }

        // truncation honesty rides along on every table
        CHECK(E.last_term_norm <= E.tail_bound);
        CHECK(F.last_term_norm <= F.tail_bound);
    }
}

TEST_CASE("constant coefficient matches expm and refines at fourth order") {
    const CoeffMatrix X =
        CoeffMatrix::from_strings({{"0.2", "1.1"}, {"-0.8", "-0.1"}}, Interval(0, 1));
    const Matrix X0 = X.eval_at(0.0);

    const auto endpoint_error = [&](int n) {
        const Grid g(0.0, 1.0, n);
        const PropagatorTable E = compute_E(X, g, {});
        double err = 0.0;
        for (int i = 0; i <= n; ++i)
            err = std::max(err, norm_max(E.values[i] - expm(X0 * g.node(i))));
        return err;
    };

    CHECK(endpoint_error(200) <= 1e-9);

    const double e1 = endpoint_error(24);
    const double e2 = endpoint_error(48);
    const double e3 = endpoint_error(96);
    CHECK(e1 / e2 >= 8.0);
    CHECK(e2 / e3 >= 8.0);
}

TEST_CASE("tail_bound") {
    CHECK(tail_bound(0.0, 3, 1.0, 5) == 0.0);
    CHECK(tail_bound(1.0, 1, 1.0, 0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(tail_bound(1.0, 2, 1.0, 40) < 1e-30);
    CHECK(tail_bound(1.0, 2, 1.0, 40) > 0.0);
    CHECK_THROWS_AS(tail_bound(-1.0, 1, 1.0, 0), InvalidArgumentError);
}

TEST_CASE("propagator residual") {
    const Grid g(0.0, 1.0, 200);
    const PropagatorTable zero = compute_E(CoeffMatrix::zero(2, 2, Interval(0, 1)), g, {});
    CHECK(propagator_residual(zero, CoeffMatrix::zero(2, 2, Interval(0, 1)), g) == 0.0);

    const CoeffMatrix nil = CoeffMatrix::from_strings({{"0", "1"}, {"0", "0"}}, Interval(0, 1));
    CHECK(propagator_residual(compute_E(nil, g, {}), nil, g) <= 1e-4);

    // centered differencing is second order: quadrupling with grid doubling
    const CoeffMatrix X = CoeffMatrix::from_strings({{"0", "1"}, {"x", "0"}}, Interval(0, 1));
    const Grid g200(0.0, 1.0, 200), g400(0.0, 1.0, 400);
    const double r200 = propagator_residual(compute_E(X, g200, {}), X, g200);
    const double r400 = propagator_residual(compute_E(X, g400, {}), X, g400);
    CHECK(r200 / r400 > 3.4);
    CHECK(r200 / r400 < 4.6);
}

TEST_CASE("series reports non-convergence") {
    const Grid g(0.0, 1.0, 20);
    const CoeffMatrix X = CoeffMatrix::from_strings({{"3"}}, Interval(0, 1));
    SeriesConfig cfg;
    cfg.max_terms = 3;
    CHECK_THROWS_AS(compute_E(X, g, cfg), TruncationError);
    try {
        compute_E(X, g, cfg);
    } catch (const TruncationError& e) {
        CHECK(e.max_terms == 3);
        CHECK(e.last_term_norm >= e.term_tol);
    }
}

TEST_CASE("series propagates coefficient domain errors") {
    const Grid g(0.0, 1.0, 20);
    const CoeffMatrix pole = CoeffMatrix::from_strings({{"1/x"}}, Interval(0, 1));
    CHECK_THROWS_AS(compute_E(pole, g, {}), EvalDomainError);
}

TEST_CASE("cumulative integral validates its samples") {
    const Grid g(0.0, 1.0, 10);
    CHECK_THROWS_AS(cumulative_integral(std::vector<Matrix>(5, Matrix(1, 1)), g),
                    DimensionError);
    std::vector<Matrix> mixed(11, Matrix(2, 2));
    mixed[4] = Matrix(1, 1);
    CHECK_THROWS_AS(cumulative_integral(mixed, g), DimensionError);
}
