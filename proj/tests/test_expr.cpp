#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ltvprop/expr.hpp"

using namespace ltvprop;

namespace {

// Random well-formed trees for the round-trip property. Literals stay
// non-negative, as they do coming out of the parser.
Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    switch (pick(rng)) {
        case 0: {
            std::uniform_real_distribution<double> v(0.0, 10.0);
            return Expr::number(v(rng));
        }
        case 1: return Expr::variable();
        case 2:
            return Expr::constant(pick(rng) % 2 == 0 ? ConstKind::Pi : ConstKind::Euler);
        case 3: return Expr::binary(BinOp::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 4: return Expr::binary(BinOp::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 5: return Expr::binary(BinOp::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 6: return Expr::binary(BinOp::Div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 7: return Expr::binary(BinOp::Pow, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 8: {
            const FuncKind funcs[] = {FuncKind::Sin, FuncKind::Cos, FuncKind::Exp,
                                      FuncKind::Ln,  FuncKind::Sqrt, FuncKind::Abs};
            return Expr::call(funcs[pick(rng) % 6], random_expr(rng, depth - 1));
        }
        default:
            return Expr::negate(random_expr(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("parse structure follows precedence") {
    const Expr e = parse_expr("x^2 + 1");
    const Expr expected = Expr::binary(
        BinOp::Add, Expr::binary(BinOp::Pow, Expr::variable(), Expr::number(2)), Expr::number(1));
    CHECK(e.same_structure(expected));

    const Expr legendre = parse_expr("1 - x^2");
    const Expr expected2 = Expr::binary(
        BinOp::Sub, Expr::number(1), Expr::binary(BinOp::Pow, Expr::variable(), Expr::number(2)));
    CHECK(legendre.same_structure(expected2));

    // unary minus binds looser than ^ and tighter than *
    CHECK(parse_expr("-x^2").same_structure(
        Expr::negate(Expr::binary(BinOp::Pow, Expr::variable(), Expr::number(2)))));
    CHECK(parse_expr("2^3^2").eval(0.0) == 512.0);
    CHECK(parse_expr("8 - 3 - 2").eval(0.0) == 3.0);
    CHECK(parse_expr("8 / 2 / 2").eval(0.0) == 2.0);
}

TEST_CASE("parse errors carry offset and expectation") {
    try {
        parse_expr("sin(x");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 5);
        CHECK(e.expected.find(")") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    CHECK_THROWS_AS(parse_expr("2 +"), ParseError);
    CHECK_THROWS_AS(parse_expr("foo(x)"), ParseError);
    CHECK_THROWS_AS(parse_expr("sin x"), ParseError);
    CHECK_THROWS_AS(parse_expr("1 2"), ParseError);
}

TEST_CASE("eval") {
    CHECK(parse_expr("x^2+1").eval(2.0) == 5.0);
    CHECK(parse_expr("exp(0)").eval(7.0) == 1.0);
    CHECK(parse_expr("2e3").eval(0.0) == 2000.0);
    CHECK(parse_expr("2*e").eval(0.0) == doctest::Approx(2 * std::numbers::e));
    CHECK(parse_expr("cos(pi)").eval(0.0) == doctest::Approx(-1.0));

    try {
        parse_expr("1/x").eval(0.0);
        FAIL("expected EvalDomainError");
    } catch (const EvalDomainError& e) {
        CHECK(e.x == 0.0);
        CHECK(e.subexpr == "1 / x");
    }
    CHECK_THROWS_AS(parse_expr("ln(x)").eval(-1.0), EvalDomainError);
    CHECK_THROWS_AS(parse_expr("sqrt(x)").eval(-4.0), EvalDomainError);
    CHECK_THROWS_AS(parse_expr("exp(x)").eval(1e5), EvalDomainError);
}

TEST_CASE("eval is deterministic") {
    const Expr e = parse_expr("sin(x)*exp(x/3) - x^2/7");
    const double a = e.eval(0.8371);
    const double b = e.eval(0.8371);
    CHECK(a == b);  // bit-identical
}

TEST_CASE("print then reparse is structurally stable") {
    std::mt19937 rng(101);
    for (int i = 0; i < 1000; ++i) {
        const Expr e = random_expr(rng, 4);
        const Expr reparsed = parse_expr(e.str());
        CHECK(reparsed.same_structure(e));
    }
    // and for text the parser produced
    for (const char* text : {"x^2 + 1", "1 - x^2", "-x^2", "x^-2", "-(x + 1)*x",
                             "sin(x)/sqrt(1 + x^2)", "2^3^2", "1 - 2 - 3", "--x"}) {
        const Expr once = parse_expr(text);
        CHECK(parse_expr(once.str()).same_structure(once));
    }
}

TEST_CASE("eval_matrix") {
    const CoeffMatrix c = CoeffMatrix::from_strings({{"0", "1"}, {"x", "0"}}, Interval(0, 4));
    CHECK(c.eval_at(2.0) == Matrix{{0, 1}, {2, 0}});

    const CoeffMatrix scalar = CoeffMatrix::from_strings({{"2*x"}}, Interval(0, 1));
    CHECK(scalar.eval_at(0.5) == Matrix{{1}});

    const CoeffMatrix bad = CoeffMatrix::from_strings({{"1/x"}}, Interval(0, 1));
    try {
        bad.eval_at(0.0);
        FAIL("expected EvalDomainError");
    } catch (const EvalDomainError& e) {
        CHECK(e.row == 0);
        CHECK(e.col == 0);
    }
}

TEST_CASE("bound_estimate") {
    const CoeffMatrix x = CoeffMatrix::from_strings({{"x"}}, Interval(0, 1));
    const BoundReport r = bound_estimate(x, 101);
    CHECK(r.M == 1.25);
    CHECK(r.probes == 101);
    CHECK(!r.offending_point);

    const BoundReport zero = bound_estimate(CoeffMatrix::zero(2, 2, Interval(0, 1)), 11);
    CHECK(zero.M == 0.0);

    const CoeffMatrix pole = CoeffMatrix::from_strings({{"1/x"}}, Interval(0, 1));
    const BoundReport bad = bound_estimate(pole, 11);
    REQUIRE(bad.offending_point.has_value());
    CHECK(*bad.offending_point == 0.0);

    CHECK_THROWS_AS(bound_estimate(x, 1), InvalidArgumentError);
}

TEST_CASE("bound_estimate is monotone in probes on monotone entries") {
    const CoeffMatrix c = CoeffMatrix::from_strings({{"exp(x)"}}, Interval(0, 2));
    double prev = 0.0;
    for (int probes : {2, 5, 11, 101, 1001}) {
        const double M = bound_estimate(c, probes).M;
        CHECK(M >= prev);
        prev = M;
    }
}

TEST_CASE("negate simplifications used by the companion form") {
    CHECK(Expr::negate(parse_expr("1")).str() == "-1");
    CHECK(Expr::negate(parse_expr("-x")).str() == "x");
    CHECK(Expr::negate(parse_expr("0")).str() == "0");
}

TEST_CASE("interval validation") {
    CHECK_THROWS_AS(Interval(-0.5, 1.0), InvalidArgumentError);
    CHECK_THROWS_AS(Interval(1.0, 1.0), InvalidArgumentError);
    CHECK(Interval(0.5, 2.0).contains(2.0));
    CHECK(!Interval(0.5, 2.0).contains(2.5));
}
