#include "ltvprop/problem.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace ltvprop {

namespace {

using nlohmann::json;

std::string require_string(const json& j, const std::string& key) {
    if (!j.at(key).is_string())
        throw InvalidArgumentError("field '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

std::vector<std::vector<std::string>> string_matrix(const json& j, const std::string& key) {
    const json& m = j.at(key);
    if (!m.is_array() || m.empty())
        throw InvalidArgumentError("field '" + key + "' must be a non-empty array of rows");
    std::vector<std::vector<std::string>> rows;
    for (const json& row : m) {
        if (!row.is_array() || row.empty())
            throw InvalidArgumentError("field '" + key + "' rows must be non-empty arrays");
        std::vector<std::string> r;
        for (const json& cell : row) {
            if (!cell.is_string())
                throw InvalidArgumentError("field '" + key +
                                           "' entries must be expression strings");
            r.push_back(cell.get<std::string>());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

Matrix number_matrix(const json& j, const std::string& key) {
    const json& m = j.at(key);
    if (!m.is_array() || m.empty())
        throw InvalidArgumentError("field '" + key + "' must be a non-empty array of rows");
    std::vector<double> entries;
    int cols = -1;
    for (const json& row : m) {
        if (!row.is_array() || row.empty())
            throw InvalidArgumentError("field '" + key + "' rows must be non-empty arrays");
        if (cols < 0) cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != cols)
            throw InvalidArgumentError("field '" + key + "' is ragged");
        for (const json& cell : row) {
            if (!cell.is_number())
                throw InvalidArgumentError("field '" + key + "' entries must be numbers");
            entries.push_back(cell.get<double>());
        }
    }
    return Matrix(static_cast<int>(m.size()), cols, std::move(entries));
}

std::vector<double> number_list(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.empty())
        throw InvalidArgumentError("field '" + key + "' must be a non-empty array of numbers");
    std::vector<double> out;
    for (const json& cell : v) {
        if (!cell.is_number())
            throw InvalidArgumentError("field '" + key + "' entries must be numbers");
        out.push_back(cell.get<double>());
    }
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed) {
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw InvalidArgumentError("unknown field '" + item.key() + "'");
    }
}

void check_dimension_hint(const json& j, const char* key, int actual) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer())
        throw InvalidArgumentError(std::string("field '") + key + "' must be an integer");
    const int stated = j.at(key).get<int>();
    if (stated != actual)
        throw InvalidArgumentError(std::string("stated dimension ") + key + "=" +
                                   std::to_string(stated) + " does not match coefficients (" +
                                   std::to_string(actual) + ")");
}

}  // namespace

std::string kind_name(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Propagator: return "propagator";
        case ProblemKind::Linear: return "linear";
        case ProblemKind::NthOrder: return "nth-order";
        case ProblemKind::Sylvester: return "sylvester";
        case ProblemKind::Riccati: return "riccati";
        case ProblemKind::RiccatiParticular: return "riccati-particular";
        case ProblemKind::ScalarRiccati: return "scalar-riccati";
    }
    return "?";
}

LinearIvp Problem::linear_ivp() const {
    if (kind == ProblemKind::NthOrder) return companion_from_scalar(a, f, u0, grid());
    if (kind != ProblemKind::Linear)
        throw InvalidArgumentError("problem kind '" + kind_name(kind) + "' is not a linear IVP");
    return LinearIvp{*A, *forcing, *initial, grid()};
}

SylvesterIvp Problem::sylvester_ivp() const {
    if (kind != ProblemKind::Sylvester)
        throw InvalidArgumentError("problem kind '" + kind_name(kind) + "' is not a Sylvester IVP");
    return SylvesterIvp{*A, *B, *P, *initial, grid()};
}

RiccatiProblem Problem::riccati() const {
    if (kind == ProblemKind::ScalarRiccati) {
        return RiccatiProblem{
            CoeffMatrix::zero(1, 1, interval),
            CoeffMatrix(1, 1, {sb}, interval),
            CoeffMatrix(1, 1, {sa}, interval),
            CoeffMatrix(1, 1, {Expr::negate(sc)}, interval),
            Matrix(1, 1, {y0}),
            grid(),
        };
    }
    if (kind != ProblemKind::Riccati && kind != ProblemKind::RiccatiParticular)
        throw InvalidArgumentError("problem kind '" + kind_name(kind) +
                                   "' is not a Riccati problem");
    return RiccatiProblem{*A, *B, *P, *Q, *initial, grid()};
}

Problem parse_problem(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidArgumentError(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidArgumentError("problem file must be a JSON object");
    if (!j.contains("kind")) throw InvalidArgumentError("missing field 'kind'");

    const std::string kind_text = require_string(j, "kind");
    ProblemKind kind;
    if (kind_text == "propagator") kind = ProblemKind::Propagator;
    else if (kind_text == "linear") kind = ProblemKind::Linear;
    else if (kind_text == "nth-order") kind = ProblemKind::NthOrder;
    else if (kind_text == "sylvester") kind = ProblemKind::Sylvester;
    else if (kind_text == "riccati") kind = ProblemKind::Riccati;
    else if (kind_text == "riccati-particular") kind = ProblemKind::RiccatiParticular;
    else if (kind_text == "scalar-riccati") kind = ProblemKind::ScalarRiccati;
    else throw InvalidArgumentError("unknown kind '" + kind_text + "'");

    if (!j.contains("interval")) throw InvalidArgumentError("missing field 'interval'");
    const std::vector<double> iv = number_list(j, "interval");
    if (iv.size() != 2) throw InvalidArgumentError("field 'interval' must be [x_lo, x_hi]");

    Problem p;
    p.kind = kind;
    p.interval = Interval(iv[0], iv[1]);

    if (!j.contains("n_intervals")) throw InvalidArgumentError("missing field 'n_intervals'");
    if (!j.at("n_intervals").is_number_integer())
        throw InvalidArgumentError("field 'n_intervals' must be an integer");
    p.n_intervals = j.at("n_intervals").get<int>();
    if (p.n_intervals <= 0 || p.n_intervals % 2 != 0)
        throw InvalidArgumentError("n_intervals must be a positive even integer, got " +
                                   std::to_string(p.n_intervals));

    if (j.contains("series")) {
        const json& s = j.at("series");
        reject_unknown(s, {"max_terms", "term_tol"});
        if (s.contains("max_terms")) p.series.max_terms = s.at("max_terms").get<int>();
        if (s.contains("term_tol")) p.series.term_tol = s.at("term_tol").get<double>();
        if (p.series.max_terms < 1) throw InvalidArgumentError("series.max_terms must be >= 1");
        if (!(p.series.term_tol > 0.0))
            throw InvalidArgumentError("series.term_tol must be positive");
    }
    if (j.contains("oracle")) {
        if (!j.at("oracle").is_boolean())
            throw InvalidArgumentError("field 'oracle' must be a boolean");
        p.oracle = j.at("oracle").get<bool>();
    }

    const std::set<std::string> common = {"kind", "interval", "n_intervals", "series", "oracle"};
    auto with = [&common](std::initializer_list<std::string> extra) {
        std::set<std::string> s = common;
        s.insert(extra.begin(), extra.end());
        return s;
    };

    switch (kind) {
        case ProblemKind::Propagator: {
            reject_unknown(j, with({"X", "n"}));
            if (!j.contains("X")) throw InvalidArgumentError("propagator problem needs 'X'");
            p.X = CoeffMatrix::from_strings(string_matrix(j, "X"), p.interval);
            if (!p.X->square())
                throw DimensionError("X must be square, got " + std::to_string(p.X->rows()) +
                                     "x" + std::to_string(p.X->cols()));
            check_dimension_hint(j, "n", p.X->rows());
            break;
        }
        case ProblemKind::Linear: {
            reject_unknown(j, with({"A", "forcing", "C", "n"}));
            if (!j.contains("A") || !j.contains("C"))
                throw InvalidArgumentError("linear problem needs 'A' and 'C'");
            p.A = CoeffMatrix::from_strings(string_matrix(j, "A"), p.interval);
            if (!p.A->square()) throw DimensionError("A must be square");
            const int n = p.A->rows();
            check_dimension_hint(j, "n", n);
            if (j.contains("forcing")) {
                if (!j.at("forcing").is_array())
                    throw InvalidArgumentError("'forcing' must be an array of n expression strings");
                std::vector<std::vector<std::string>> col;
                for (const json& cell : j.at("forcing")) {
                    if (!cell.is_string())
                        throw InvalidArgumentError("'forcing' must be an array of n expression strings");
                    col.push_back({cell.get<std::string>()});
                }
                p.forcing = CoeffMatrix::from_strings(col, p.interval);
            } else {
                p.forcing = CoeffMatrix::zero(n, 1, p.interval);
            }
            if (p.forcing->rows() != n || p.forcing->cols() != 1)
                throw DimensionError("forcing must have " + std::to_string(n) + " entries");
            const std::vector<double> c = number_list(j, "C");
            if (static_cast<int>(c.size()) != n)
                throw DimensionError("C must have " + std::to_string(n) + " entries");
            p.initial = Matrix(n, 1, c);
            break;
        }
        case ProblemKind::NthOrder: {
            reject_unknown(j, with({"a", "f", "u0", "n"}));
            if (!j.contains("a") || !j.contains("u0"))
                throw InvalidArgumentError("nth-order problem needs 'a' and 'u0'");
            for (const json& cell : j.at("a")) {
                if (!cell.is_string())
                    throw InvalidArgumentError("'a' must be an array of expression strings");
                p.a.push_back(parse_expr(cell.get<std::string>()));
            }
            if (p.a.empty()) throw InvalidArgumentError("'a' must be non-empty");
            check_dimension_hint(j, "n", static_cast<int>(p.a.size()));
            if (j.contains("f")) p.f = parse_expr(require_string(j, "f"));
            p.u0 = number_list(j, "u0");
            if (p.u0.size() != p.a.size())
                throw DimensionError("u0 must have " + std::to_string(p.a.size()) + " entries");
            break;
        }
        case ProblemKind::Sylvester: {
            reject_unknown(j, with({"A", "B", "P", "U0", "n", "m"}));
            for (const char* key : {"A", "B", "P", "U0"})
                if (!j.contains(key))
                    throw InvalidArgumentError(std::string("sylvester problem needs '") + key + "'");
            p.A = CoeffMatrix::from_strings(string_matrix(j, "A"), p.interval);
            p.B = CoeffMatrix::from_strings(string_matrix(j, "B"), p.interval);
            p.P = CoeffMatrix::from_strings(string_matrix(j, "P"), p.interval);
            p.initial = number_matrix(j, "U0");
            if (!p.A->square() || !p.B->square())
                throw DimensionError("A and B must be square");
            const int n = p.A->rows(), m = p.B->rows();
            check_dimension_hint(j, "n", n);
            check_dimension_hint(j, "m", m);
            if (p.P->rows() != n || p.P->cols() != m)
                throw DimensionError("P must be " + std::to_string(n) + "x" + std::to_string(m));
            if (p.initial->rows() != n || p.initial->cols() != m)
                throw DimensionError("U0 must be " + std::to_string(n) + "x" + std::to_string(m));
            break;
        }
        case ProblemKind::Riccati:
        case ProblemKind::RiccatiParticular: {
            reject_unknown(j, with({"A", "B", "P", "Q", "W0", "n", "m"}));
            for (const char* key : {"A", "B", "P", "Q", "W0"})
                if (!j.contains(key))
                    throw InvalidArgumentError(std::string(kind_name(kind)) + " problem needs '" +
                                               key + "'");
            p.A = CoeffMatrix::from_strings(string_matrix(j, "A"), p.interval);
            p.B = CoeffMatrix::from_strings(string_matrix(j, "B"), p.interval);
            p.P = CoeffMatrix::from_strings(string_matrix(j, "P"), p.interval);
            p.Q = CoeffMatrix::from_strings(string_matrix(j, "Q"), p.interval);
            p.initial = number_matrix(j, "W0");
            if (!p.A->square() || !p.B->square())
                throw DimensionError("A and B must be square");
            const int n = p.A->rows(), m = p.B->rows();
            check_dimension_hint(j, "n", n);
            check_dimension_hint(j, "m", m);
            if (p.P->rows() != m || p.P->cols() != n)
                throw DimensionError("P must be " + std::to_string(m) + "x" + std::to_string(n));
            if (p.Q->rows() != n || p.Q->cols() != m)
                throw DimensionError("Q must be " + std::to_string(n) + "x" + std::to_string(m));
            if (p.initial->rows() != n || p.initial->cols() != m)
                throw DimensionError("W0 must be " + std::to_string(n) + "x" + std::to_string(m));
            break;
        }
        case ProblemKind::ScalarRiccati: {
            reject_unknown(j, with({"a", "b", "c", "y0"}));
            for (const char* key : {"a", "b", "c", "y0"})
                if (!j.contains(key))
                    throw InvalidArgumentError(std::string("scalar-riccati problem needs '") +
                                               key + "'");
            p.sa = parse_expr(require_string(j, "a"));
            p.sb = parse_expr(require_string(j, "b"));
            p.sc = parse_expr(require_string(j, "c"));
            if (!j.at("y0").is_number())
                throw InvalidArgumentError("field 'y0' must be a number");
            p.y0 = j.at("y0").get<double>();
            break;
        }
    }
    return p;
}

Problem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str());
}

}  // namespace ltvprop
