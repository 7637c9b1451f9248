#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltvprop/matrix.hpp"

namespace ltvprop {

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class FuncKind { Sin, Cos, Exp, Ln, Sqrt, Abs };
enum class ConstKind { Pi, Euler };

/// Immutable expression tree over one free variable x. Supports numeric
/// literals, the constants pi and e, unary negation, + - * / ^, and the
/// functions sin cos exp ln sqrt abs. Built by parse_expr() or the factories.
class Expr {
public:
    Expr() = default;

    static Expr number(double value);
    static Expr variable();
    static Expr constant(ConstKind kind);
    static Expr call(FuncKind func, Expr arg);
    static Expr binary(BinOp op, Expr lhs, Expr rhs);

    /// Negation with the two simplifications the companion construction
    /// needs: neg(neg(e)) = e and neg(0) = 0.
    static Expr negate(Expr e);

    friend Expr operator+(Expr a, Expr b) { return binary(BinOp::Add, std::move(a), std::move(b)); }
    friend Expr operator-(Expr a, Expr b) { return binary(BinOp::Sub, std::move(a), std::move(b)); }
    friend Expr operator*(Expr a, Expr b) { return binary(BinOp::Mul, std::move(a), std::move(b)); }
    friend Expr operator/(Expr a, Expr b) { return binary(BinOp::Div, std::move(a), std::move(b)); }

    bool valid() const { return node_ != nullptr; }

    /// Evaluate at x. A non-finite intermediate (1/0, ln(-1), ...) raises
    /// EvalDomainError carrying x and the offending subexpression.
    double eval(double x) const;

    /// Canonical text form; parsing it back yields a structurally
    /// identical tree.
    std::string str() const;

    bool same_structure(const Expr& other) const;

    /// False for trees that never reference the variable.
    bool depends_on_x() const;

    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    const Node& node() const { return *node_; }

private:
    std::shared_ptr<const Node> node_;
};

/// Parse expression text. Precedence ^ > unary minus > * / > + -, with
/// left-associative + - * / and right-associative ^. Syntax errors raise
/// ParseError with the byte offset and a description of what was expected.
Expr parse_expr(std::string_view text);

/// Closed interval on the real line with lo >= 0, the x-range a coefficient
/// matrix claims to be bounded on.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo_, double hi_);

    bool contains(double x) const;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/// Matrix-valued function of x: a grid of expressions plus the interval
/// they are claimed bounded on.
class CoeffMatrix {
public:
    CoeffMatrix(int rows, int cols, std::vector<Expr> entries, Interval domain);

    static CoeffMatrix zero(int rows, int cols, Interval domain);
    static CoeffMatrix constant(const Matrix& value, Interval domain);
    static CoeffMatrix from_strings(const std::vector<std::vector<std::string>>& rows,
                                    Interval domain);

    /// 2x2 block layout [[tl, tr], [bl, br]]; shapes must tile and the
    /// domains must agree.
    static CoeffMatrix block2x2(const CoeffMatrix& tl, const CoeffMatrix& tr,
                                const CoeffMatrix& bl, const CoeffMatrix& br);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    const Interval& domain() const { return domain_; }
    const Expr& at(int r, int c) const { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }

    /// Entrywise evaluation; x must lie in the domain. Entry failures are
    /// re-raised with (row, col) attached.
    Matrix eval_at(double x) const;

    /// Every entry negated (used for the inverse propagators).
    CoeffMatrix negated() const;

    bool is_constant() const;

private:
    int rows_;
    int cols_;
    std::vector<Expr> entries_;
    Interval domain_;
};

/// Result of probing a coefficient matrix for boundedness.
struct BoundReport {
    double M = 0.0;                          // estimated sup of norm_max, inflated by 1.25
    int probes = 0;                          // points actually sampled
    std::optional<double> offending_point;   // first x with a non-finite entry
};

/// Probe `probes` equispaced points of the domain (endpoints included) and
/// report M = 1.25 * sup of norm_max over the finite probes. A non-finite
/// probe is reported through offending_point rather than thrown, so callers
/// decide whether boundedness is fatal.
BoundReport bound_estimate(const CoeffMatrix& c, int probes);

}  // namespace ltvprop
