#include "ltvprop/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <utility>

namespace ltvprop {

struct Expr::Node {
    enum class Kind { Number, Var, Const, Neg, Binary, Call };
    Kind kind;
    double value = 0.0;   // Number
    ConstKind cval{};     // Const
    BinOp op{};           // Binary
    FuncKind func{};      // Call
    Expr a, b;            // a for Neg/Call, a and b for Binary
};

namespace {

using Node = Expr::Node;

Expr make_node(Node n) {
    return Expr(std::make_shared<const Node>(std::move(n)));
}

const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Sin: return "sin";
        case FuncKind::Cos: return "cos";
        case FuncKind::Exp: return "exp";
        case FuncKind::Ln: return "ln";
        case FuncKind::Sqrt: return "sqrt";
        case FuncKind::Abs: return "abs";
    }
    return "?";
}

// Precedence levels used by both the parser and the printer:
// + - (1) < * / (2) < unary minus (3) < ^ (4) < atoms (5).
int prec_of(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Binary:
            switch (n.op) {
                case BinOp::Add:
                case BinOp::Sub: return 1;
                case BinOp::Mul:
                case BinOp::Div: return 2;
                case BinOp::Pow: return 4;
            }
            return 1;
        case Node::Kind::Neg: return 3;
        default: return 5;
    }
}

// Shortest decimal form that parses back to the same double.
std::string format_number(double v) {
    char buf[40];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void print_node(const Node& n, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
    const bool parens = prec_of(child.node()) < min_prec;
    if (parens) out += '(';
    print_node(child.node(), out);
    if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::Number:
            out += format_number(n.value);
            return;
        case Node::Kind::Var:
            out += 'x';
            return;
        case Node::Kind::Const:
            out += (n.cval == ConstKind::Pi) ? "pi" : "e";
            return;
        case Node::Kind::Neg:
            out += '-';
            print_child(n.a, 3, out);
            return;
        case Node::Kind::Call:
            out += func_name(n.func);
            out += '(';
            print_node(n.a.node(), out);
            out += ')';
            return;
        case Node::Kind::Binary: {
            if (n.op == BinOp::Pow) {
                // Left operand must be an atom (a^b^c is right-associative,
                // -x^2 is -(x^2)); the exponent may be any unary expression.
                print_child(n.a, 5, out);
                out += '^';
                print_child(n.b, 3, out);
                return;
            }
            const int p = prec_of(n);
            const char* sym = n.op == BinOp::Add ? " + "
                            : n.op == BinOp::Sub ? " - "
                            : n.op == BinOp::Mul ? " * "
                                                 : " / ";
            print_child(n.a, p, out);
            out += sym;
            print_child(n.b, p + 1, out);  // left-associative: equal precedence on the right needs parens
            return;
        }
    }
}

[[noreturn]] void domain_error(const Node& n, double x) {
    std::string sub;
    print_node(n, sub);
    throw EvalDomainError("domain error at x=" + format_number(x) + ": '" + sub +
                              "' is non-finite",
                          x, sub);
}

double eval_node(const Node& n, double x) {
    switch (n.kind) {
        case Node::Kind::Number: return n.value;
        case Node::Kind::Var: return x;
        case Node::Kind::Const:
            return n.cval == ConstKind::Pi ? std::numbers::pi : std::numbers::e;
        case Node::Kind::Neg: return -eval_node(n.a.node(), x);
        case Node::Kind::Call: {
            const double v = eval_node(n.a.node(), x);
            double r = 0.0;
            switch (n.func) {
                case FuncKind::Sin: r = std::sin(v); break;
                case FuncKind::Cos: r = std::cos(v); break;
                case FuncKind::Exp: r = std::exp(v); break;
                case FuncKind::Ln: r = std::log(v); break;
                case FuncKind::Sqrt: r = std::sqrt(v); break;
                case FuncKind::Abs: r = std::fabs(v); break;
            }
            if (!std::isfinite(r)) domain_error(n, x);
            return r;
        }
        case Node::Kind::Binary: {
            const double a = eval_node(n.a.node(), x);
            const double b = eval_node(n.b.node(), x);
            double r = 0.0;
            switch (n.op) {
                case BinOp::Add: r = a + b; break;
                case BinOp::Sub: r = a - b; break;
                case BinOp::Mul: r = a * b; break;
                case BinOp::Div: r = a / b; break;
                case BinOp::Pow: r = std::pow(a, b); break;
            }
            if (!std::isfinite(r)) domain_error(n, x);
            return r;
        }
    }
    return 0.0;
}

bool same_node(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Node::Kind::Number: return a.value == b.value;
        case Node::Kind::Var: return true;
        case Node::Kind::Const: return a.cval == b.cval;
        case Node::Kind::Neg: return same_node(a.a.node(), b.a.node());
        case Node::Kind::Call:
            return a.func == b.func && same_node(a.a.node(), b.a.node());
        case Node::Kind::Binary:
            return a.op == b.op && same_node(a.a.node(), b.a.node()) &&
                   same_node(a.b.node(), b.b.node());
    }
    return false;
}

bool node_depends_on_x(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Var: return true;
        case Node::Kind::Neg:
        case Node::Kind::Call: return node_depends_on_x(n.a.node());
        case Node::Kind::Binary:
            return node_depends_on_x(n.a.node()) || node_depends_on_x(n.b.node());
        default: return false;
    }
}

// Recursive-descent parser over the raw text; offsets are byte positions.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e = parse_sum();
        skip_space();
        if (pos_ != text_.size()) fail("end of input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected) {
        throw ParseError("syntax error at offset " + std::to_string(pos_) +
                             ": expected " + expected,
                         pos_, expected);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_sum() {
        Expr e = parse_term();
        while (true) {
            if (eat('+')) e = Expr::binary(BinOp::Add, std::move(e), parse_term());
            else if (eat('-')) e = Expr::binary(BinOp::Sub, std::move(e), parse_term());
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        while (true) {
            if (eat('*')) e = Expr::binary(BinOp::Mul, std::move(e), parse_unary());
            else if (eat('/')) e = Expr::binary(BinOp::Div, std::move(e), parse_unary());
            else return e;
        }
    }

    Expr parse_unary() {
        if (eat('-')) {
            Node n{};
            n.kind = Node::Kind::Neg;
            n.a = parse_unary();
            return make_node(std::move(n));
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (eat('^')) return Expr::binary(BinOp::Pow, std::move(base), parse_unary());
        return base;
    }

    Expr parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("an expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!eat(')')) fail("\")\"");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("an expression");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        // Exponent only when it is actually followed by digits, so "2e"
        // lexes as the number 2 and the constant e.
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.')) {
            pos_ = start;
            fail("a number");
        }
        const std::string slice(text_.substr(start, pos_ - start));
        return Expr::number(std::strtod(slice.c_str(), nullptr));
    }

    Expr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x") return Expr::variable();
        if (name == "pi") return Expr::constant(ConstKind::Pi);
        if (name == "e") return Expr::constant(ConstKind::Euler);

        FuncKind func;
        if (name == "sin") func = FuncKind::Sin;
        else if (name == "cos") func = FuncKind::Cos;
        else if (name == "exp") func = FuncKind::Exp;
        else if (name == "ln") func = FuncKind::Ln;
        else if (name == "sqrt") func = FuncKind::Sqrt;
        else if (name == "abs") func = FuncKind::Abs;
        else {
            pos_ = start;
            fail("one of x, pi, e, sin, cos, exp, ln, sqrt, abs");
        }
        if (!eat('(')) fail("\"(\"");
        Expr arg = parse_sum();
        if (!eat(')')) fail("\")\"");
        return Expr::call(func, std::move(arg));
    }
};

}  // namespace

Expr Expr::number(double value) {
    if (!std::isfinite(value)) throw NonFiniteError("non-finite expression literal");
    Node n{};
    n.kind = Node::Kind::Number;
    n.value = value;
    return make_node(std::move(n));
}

Expr Expr::variable() {
    Node n{};
    n.kind = Node::Kind::Var;
    return make_node(std::move(n));
}

Expr Expr::constant(ConstKind kind) {
    Node n{};
    n.kind = Node::Kind::Const;
    n.cval = kind;
    return make_node(std::move(n));
}

Expr Expr::call(FuncKind func, Expr arg) {
    Node n{};
    n.kind = Node::Kind::Call;
    n.func = func;
    n.a = std::move(arg);
    return make_node(std::move(n));
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
    Node n{};
    n.kind = Node::Kind::Binary;
    n.op = op;
    n.a = std::move(lhs);
    n.b = std::move(rhs);
    return make_node(std::move(n));
}

Expr Expr::negate(Expr e) {
    const Node& n = e.node();
    if (n.kind == Node::Kind::Neg) return n.a;
    if (n.kind == Node::Kind::Number && n.value == 0.0) return e;
    Node wrapped{};
    wrapped.kind = Node::Kind::Neg;
    wrapped.a = std::move(e);
    return make_node(std::move(wrapped));
}

double Expr::eval(double x) const { return eval_node(*node_, x); }

std::string Expr::str() const {
    std::string out;
    print_node(*node_, out);
    return out;
}

bool Expr::same_structure(const Expr& other) const {
    return same_node(*node_, *other.node_);
}

bool Expr::depends_on_x() const { return node_depends_on_x(*node_); }

Expr parse_expr(std::string_view text) { return Parser(text).run(); }

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(std::isfinite(lo) && std::isfinite(hi)))
        throw NonFiniteError("interval endpoints must be finite");
    if (lo < 0.0)
        throw InvalidArgumentError("interval must start at x >= 0, got lo=" +
                                   std::to_string(lo));
    if (!(lo < hi))
        throw InvalidArgumentError("interval requires lo < hi, got [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

bool Interval::contains(double x) const {
    const double slack = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
    return x >= lo - slack && x <= hi + slack;
}

CoeffMatrix::CoeffMatrix(int rows, int cols, std::vector<Expr> entries, Interval domain)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), domain_(domain) {
    if (rows <= 0 || cols <= 0)
        throw DimensionError("coefficient matrix dimensions must be positive");
    if (entries_.size() != static_cast<std::size_t>(rows) * cols)
        throw DimensionError("coefficient entry count does not match shape " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    for (const Expr& e : entries_)
        if (!e.valid()) throw InvalidArgumentError("empty expression in coefficient matrix");
}

CoeffMatrix CoeffMatrix::zero(int rows, int cols, Interval domain) {
    std::vector<Expr> entries(static_cast<std::size_t>(rows) * cols, Expr::number(0.0));
    return CoeffMatrix(rows, cols, std::move(entries), domain);
}

CoeffMatrix CoeffMatrix::constant(const Matrix& value, Interval domain) {
    std::vector<Expr> entries;
    entries.reserve(value.entries().size());
    for (double v : value.entries()) {
        // Keep literals non-negative so printing round-trips structurally.
        entries.push_back(v < 0.0 ? Expr::negate(Expr::number(-v)) : Expr::number(v));
    }
    return CoeffMatrix(value.rows(), value.cols(), std::move(entries), domain);
}

CoeffMatrix CoeffMatrix::from_strings(const std::vector<std::vector<std::string>>& rows,
                                      Interval domain) {
    if (rows.empty() || rows.front().empty())
        throw DimensionError("coefficient matrix must be non-empty");
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.front().size());
    std::vector<Expr> entries;
    entries.reserve(static_cast<std::size_t>(r) * c);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c)
            throw DimensionError("ragged coefficient matrix");
        for (const auto& text : row) entries.push_back(parse_expr(text));
    }
    return CoeffMatrix(r, c, std::move(entries), domain);
}

CoeffMatrix CoeffMatrix::block2x2(const CoeffMatrix& tl, const CoeffMatrix& tr,
                                  const CoeffMatrix& bl, const CoeffMatrix& br) {
    if (tl.rows() != tr.rows() || bl.rows() != br.rows() ||
        tl.cols() != bl.cols() || tr.cols() != br.cols()) {
        throw DimensionError("block layout does not tile: [" +
                             std::to_string(tl.rows()) + "x" + std::to_string(tl.cols()) + ", " +
                             std::to_string(tr.rows()) + "x" + std::to_string(tr.cols()) + "; " +
                             std::to_string(bl.rows()) + "x" + std::to_string(bl.cols()) + ", " +
                             std::to_string(br.rows()) + "x" + std::to_string(br.cols()) + "]");
    }
    if (!(tl.domain() == tr.domain() && tl.domain() == bl.domain() && tl.domain() == br.domain()))
        throw InvalidArgumentError("block coefficient domains differ");

    const int rows = tl.rows() + bl.rows();
    const int cols = tl.cols() + tr.cols();
    std::vector<Expr> entries;
    entries.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const bool top = i < tl.rows();
            const bool left = j < tl.cols();
            const CoeffMatrix& src = top ? (left ? tl : tr) : (left ? bl : br);
            entries.push_back(src.at(top ? i : i - tl.rows(), left ? j : j - tl.cols()));
        }
    }
    return CoeffMatrix(rows, cols, std::move(entries), tl.domain());
}

Matrix CoeffMatrix::eval_at(double x) const {
    if (!domain_.contains(x))
        throw InvalidArgumentError("x=" + std::to_string(x) + " outside coefficient domain [" +
                                   std::to_string(domain_.lo) + ", " +
                                   std::to_string(domain_.hi) + "]");
    std::vector<double> values(entries_.size());
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            try {
                values[static_cast<std::size_t>(i) * cols_ + j] = at(i, j).eval(x);
            } catch (const EvalDomainError& e) {
                throw EvalDomainError(std::string(e.what()) + " (entry " +
                                          std::to_string(i) + "," + std::to_string(j) + ")",
                                      e.x, e.subexpr, i, j);
            }
        }
    }
    return Matrix(rows_, cols_, std::move(values));
}

CoeffMatrix CoeffMatrix::negated() const {
    std::vector<Expr> entries;
    entries.reserve(entries_.size());
    for (const Expr& e : entries_) entries.push_back(Expr::negate(e));
    return CoeffMatrix(rows_, cols_, std::move(entries), domain_);
}

bool CoeffMatrix::is_constant() const {
    for (const Expr& e : entries_)
        if (e.depends_on_x()) return false;
    return true;
}

BoundReport bound_estimate(const CoeffMatrix& c, int probes) {
    if (probes < 2) throw InvalidArgumentError("bound_estimate requires probes >= 2");
    BoundReport report;
    report.probes = probes;
    const double step = c.domain().length() / (probes - 1);
    double sup = 0.0;
    for (int j = 0; j < probes; ++j) {
        const double x = (j == probes - 1) ? c.domain().hi : c.domain().lo + j * step;
        try {
            sup = std::max(sup, norm_max(c.eval_at(x)));
        } catch (const EvalDomainError&) {
            report.offending_point = x;
            break;
        }
    }
    report.M = 1.25 * sup;  // safety margin; the bound is advisory
    return report;
}

}  // namespace ltvprop
