#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ltvprop/oracle.hpp"
#include "ltvprop/series.hpp"
#include "ltvprop/solvers.hpp"

namespace py = pybind11;
using namespace ltvprop;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty())
        throw DimensionError("matrix rows must be non-empty");
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.front().size());
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(r) * c);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c) throw DimensionError("ragged matrix rows");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(entries));
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
}

}  // namespace

PYBIND11_MODULE(_ltvprop, m) {
    m.doc() = "iterated-integral propagators for linear time-varying and Riccati systems";

    // Base first: later-registered translators run first, so the most
    // specific exception types take precedence.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<EvalDomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<TruncationError>(m, "TruncationError", PyExc_ArithmeticError);
    py::register_exception<BlowUpError>(m, "BlowUpError", PyExc_ArithmeticError);

    py::class_<Matrix>(m, "Matrix")
        .def(py::init(&matrix_from_rows), py::arg("rows"))
        .def_static("identity", &Matrix::identity, py::arg("n"))
        .def_property_readonly("rows", &Matrix::rows)
        .def_property_readonly("cols", &Matrix::cols)
        .def("__getitem__",
             [](const Matrix& self, std::pair<int, int> idx) {
                 if (idx.first < 0 || idx.first >= self.rows() || idx.second < 0 ||
                     idx.second >= self.cols())
                     throw py::index_error();
                 return self(idx.first, idx.second);
             })
        .def("tolist", &matrix_to_rows)
        .def("__repr__", [](const Matrix& self) {
            return "Matrix(" + std::to_string(self.rows()) + "x" + std::to_string(self.cols()) +
                   ")";
        });

    m.def("mat_mul", [](const Matrix& a, const Matrix& b) { return a * b; });
    m.def("mat_inverse", &inverse);
    m.def("mat_det", &det);
    m.def("mat_expm", &expm);
    m.def("mat_norm_max", &norm_max);

    py::class_<Expr>(m, "Expr")
        .def("eval", &Expr::eval, py::arg("x"))
        .def("__str__", &Expr::str);
    m.def("parse_expr", [](const std::string& text) { return parse_expr(text); }, py::arg("text"));

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi);

    py::class_<CoeffMatrix>(m, "CoeffMatrix")
        .def(py::init([](const std::vector<std::vector<std::string>>& rows, double lo, double hi) {
                 return CoeffMatrix::from_strings(rows, Interval(lo, hi));
             }),
             py::arg("rows"), py::arg("lo"), py::arg("hi"))
        .def_property_readonly("rows", &CoeffMatrix::rows)
        .def_property_readonly("cols", &CoeffMatrix::cols)
        .def("eval_at", &CoeffMatrix::eval_at, py::arg("x"))
        .def("negated", &CoeffMatrix::negated);

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("M", &BoundReport::M)
        .def_readonly("probes", &BoundReport::probes)
        .def_readonly("offending_point", &BoundReport::offending_point);
    m.def("bound_estimate", &bound_estimate, py::arg("c"), py::arg("probes") = 101);

    py::class_<Grid>(m, "Grid")
        .def(py::init<double, double, int>(), py::arg("x_lo"), py::arg("x_hi"),
             py::arg("n_intervals"))
        .def_property_readonly("n_intervals", &Grid::n_intervals)
        .def_property_readonly("n_nodes", &Grid::n_nodes)
        .def_property_readonly("spacing", &Grid::spacing)
        .def("node", &Grid::node, py::arg("i"));

    py::class_<SeriesConfig>(m, "SeriesConfig")
        .def(py::init([](int max_terms, double term_tol) {
                 return SeriesConfig{max_terms, term_tol};
             }),
             py::arg("max_terms") = 40, py::arg("term_tol") = 1e-13)
        .def_readwrite("max_terms", &SeriesConfig::max_terms)
        .def_readwrite("term_tol", &SeriesConfig::term_tol);

    py::enum_<PropagatorKind>(m, "PropagatorKind")
        .value("E", PropagatorKind::E)
        .value("F", PropagatorKind::F);

    py::class_<PropagatorTable>(m, "PropagatorTable")
        .def_readonly("kind", &PropagatorTable::kind)
        .def_readonly("values", &PropagatorTable::values)
        .def_readonly("terms_used", &PropagatorTable::terms_used)
        .def_readonly("last_term_norm", &PropagatorTable::last_term_norm)
        .def_readonly("tail_bound", &PropagatorTable::tail_bound);

    m.def("compute_E", &compute_E, py::arg("X"), py::arg("grid"),
          py::arg("cfg") = SeriesConfig{});
    m.def("compute_F", &compute_F, py::arg("X"), py::arg("grid"),
          py::arg("cfg") = SeriesConfig{});
    m.def("tail_bound", &tail_bound, py::arg("M"), py::arg("n"), py::arg("x"),
          py::arg("terms_summed"));
    m.def("propagator_residual", &propagator_residual, py::arg("table"), py::arg("X"),
          py::arg("grid"));

    py::class_<PropagatorStats>(m, "PropagatorStats")
        .def_readonly("label", &PropagatorStats::label)
        .def_readonly("terms_used", &PropagatorStats::terms_used)
        .def_readonly("last_term_norm", &PropagatorStats::last_term_norm)
        .def_readonly("tail_bound", &PropagatorStats::tail_bound);

    py::class_<SolveMeta>(m, "SolveMeta")
        .def_readonly("propagators", &SolveMeta::propagators)
        .def_readonly("max_residual", &SolveMeta::max_residual)
        .def_readonly("blow_up_node", &SolveMeta::blow_up_node)
        .def_readonly("blow_up_x", &SolveMeta::blow_up_x);

    py::class_<Solution>(m, "Solution")
        .def_readonly("values", &Solution::values)
        .def_readonly("meta", &Solution::meta)
        .def_property_readonly("grid", [](const Solution& s) { return s.grid; });

    py::class_<LinearIvp>(m, "LinearIvp")
        .def(py::init<CoeffMatrix, CoeffMatrix, Matrix, Grid>(), py::arg("A"),
             py::arg("forcing"), py::arg("initial"), py::arg("grid"));
    py::class_<SylvesterIvp>(m, "SylvesterIvp")
        .def(py::init<CoeffMatrix, CoeffMatrix, CoeffMatrix, Matrix, Grid>(), py::arg("A"),
             py::arg("B"), py::arg("P"), py::arg("U0"), py::arg("grid"));
    py::class_<RiccatiProblem>(m, "RiccatiProblem")
        .def(py::init<CoeffMatrix, CoeffMatrix, CoeffMatrix, CoeffMatrix, Matrix, Grid>(),
             py::arg("A"), py::arg("B"), py::arg("P"), py::arg("Q"), py::arg("W0"),
             py::arg("grid"));

    py::class_<RiccatiFactors>(m, "RiccatiFactors")
        .def_readonly("W1", &RiccatiFactors::W1)
        .def_readonly("W2", &RiccatiFactors::W2)
        .def_readonly("blow_up_node", &RiccatiFactors::blow_up_node);
    py::class_<RiccatiFactorsF>(m, "RiccatiFactorsF")
        .def_readonly("U1", &RiccatiFactorsF::U1)
        .def_readonly("U2", &RiccatiFactorsF::U2)
        .def_readonly("blow_up_node", &RiccatiFactorsF::blow_up_node);
    py::class_<RiccatiBlockResult>(m, "RiccatiBlockResult")
        .def_readonly("solution", &RiccatiBlockResult::solution)
        .def_readonly("factors", &RiccatiBlockResult::factors);
    py::class_<RiccatiBlockResultF>(m, "RiccatiBlockResultF")
        .def_readonly("solution", &RiccatiBlockResultF::solution)
        .def_readonly("factors", &RiccatiBlockResultF::factors);

    m.def("companion_from_scalar", &companion_from_scalar, py::arg("a"), py::arg("f"),
          py::arg("u0"), py::arg("grid"));
    m.def("solve_linear_ivp", &solve_linear_ivp, py::arg("p"), py::arg("cfg") = SeriesConfig{});
    m.def("solve_sylvester", &solve_sylvester, py::arg("p"), py::arg("cfg") = SeriesConfig{});
    m.def("solve_riccati_block_E", &solve_riccati_block_E, py::arg("p"),
          py::arg("cfg") = SeriesConfig{});
    m.def("solve_riccati_block_F", &solve_riccati_block_F, py::arg("p"),
          py::arg("cfg") = SeriesConfig{});
    m.def("riccati_from_particular", &riccati_from_particular, py::arg("p"),
          py::arg("cfg") = SeriesConfig{});
    m.def(
        "scalar_riccati",
        [](const std::string& a, const std::string& b, const std::string& c, double y0,
           const Grid& grid, const SeriesConfig& cfg) {
            return scalar_riccati(parse_expr(a), parse_expr(b), parse_expr(c), y0, grid, cfg);
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("y0"), py::arg("grid"),
        py::arg("cfg") = SeriesConfig{});

    py::class_<OracleConfig>(m, "OracleConfig")
        .def(py::init([](double step, double guard) {
                 return OracleConfig{step, guard};
             }),
             py::arg("step") = 1e-4, py::arg("blow_up_guard") = 1e8)
        .def_readwrite("step", &OracleConfig::step)
        .def_readwrite("blow_up_guard", &OracleConfig::blow_up_guard);
    m.def("rk4_linear", &rk4_linear, py::arg("p"), py::arg("cfg") = OracleConfig{});
    m.def("rk4_riccati", &rk4_riccati, py::arg("p"), py::arg("cfg") = OracleConfig{});
    m.def("compare", &compare, py::arg("a"), py::arg("b"));
}
