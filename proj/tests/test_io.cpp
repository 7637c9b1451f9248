#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ltvprop/problem.hpp"
#include "ltvprop/solution_io.hpp"

using namespace ltvprop;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const char* name) {
    return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("problem parsing per kind") {
    const Problem prop = parse_problem(R"({
        "kind": "propagator",
        "X": [["0", "1"], ["x", "0"]],
        "interval": [0.0, 1.0],
        "n_intervals": 100
    })");
    CHECK(prop.kind == ProblemKind::Propagator);
    CHECK(prop.X->rows() == 2);
    CHECK(prop.series.max_terms == 40);

    const Problem lin = parse_problem(R"({
        "kind": "linear",
        "A": [["0", "-1"], ["1", "0"]],
        "forcing": ["x", "0"],
        "C": [0.0, 1.0],
        "interval": [0.0, 1.0],
        "n_intervals": 200,
        "series": {"max_terms": 30, "term_tol": 1e-12},
        "oracle": true
    })");
    CHECK(lin.kind == ProblemKind::Linear);
    CHECK(lin.series.max_terms == 30);
    CHECK(lin.oracle);
    CHECK(lin.linear_ivp().initial == Matrix{{0.0}, {1.0}});

    const Problem nth = parse_problem(R"({
        "kind": "nth-order",
        "a": ["0", "1"],
        "u0": [0.0, 1.0],
        "interval": [0.0, 1.0],
        "n_intervals": 200
    })");
    CHECK(nth.linear_ivp().A.at(0, 1).str() == "-1");

    const Problem syl = parse_problem(R"({
        "kind": "sylvester",
        "A": [["0"]], "B": [["0", "0"], ["0", "0"]], "P": [["x", "1"]],
        "U0": [[0.0, 0.5]],
        "interval": [0.0, 1.0],
        "n_intervals": 100
    })");
    CHECK(syl.sylvester_ivp().P.cols() == 2);

    const Problem ric = parse_problem(R"({
        "kind": "riccati",
        "n": 1, "m": 1,
        "A": [["0"]], "B": [["0"]], "P": [["1"]], "Q": [["0"]],
        "W0": [[1.0]],
        "interval": [0.0, 1.0],
        "n_intervals": 200
    })");
    CHECK(ric.riccati().W0 == Matrix{{1.0}});

    const Problem sc = parse_problem(R"({
        "kind": "scalar-riccati",
        "a": "1", "b": "0", "c": "1", "y0": 0.0,
        "interval": [0.0, 1.0],
        "n_intervals": 200
    })");
    CHECK(sc.riccati().Q.at(0, 0).str() == "-1");
}

TEST_CASE("problem validation errors") {
    // unknown field
    CHECK_THROWS_WITH_AS(parse_problem(R"({
        "kind": "propagator", "X": [["0"]], "interval": [0, 1],
        "n_intervals": 10, "extra": 1
    })"),
                         doctest::Contains("unknown field"), InvalidArgumentError);

    // odd n_intervals
    CHECK_THROWS_WITH_AS(parse_problem(R"({
        "kind": "propagator", "X": [["0"]], "interval": [0, 1], "n_intervals": 11
    })"),
                         doctest::Contains("even"), InvalidArgumentError);

    // shape mismatch between stated and actual dimension
    CHECK_THROWS_AS(parse_problem(R"({
        "kind": "propagator", "n": 3, "X": [["0"]], "interval": [0, 1], "n_intervals": 10
    })"),
                    InvalidArgumentError);

    // non-square X
    CHECK_THROWS_AS(parse_problem(R"({
        "kind": "propagator", "X": [["0", "1"]], "interval": [0, 1], "n_intervals": 10
    })"),
                    DimensionError);

    // riccati shape inconsistency: P must be m x n
    CHECK_THROWS_AS(parse_problem(R"({
        "kind": "riccati",
        "A": [["0", "0"], ["0", "0"]], "B": [["0"]], "P": [["1", "1"], ["1", "1"]],
        "Q": [["0"], ["0"]], "W0": [[1.0], [0.0]],
        "interval": [0, 1], "n_intervals": 10
    })"),
                    DimensionError);

    // expression syntax error inside a coefficient
    CHECK_THROWS_AS(parse_problem(R"({
        "kind": "propagator", "X": [["sin(x"]], "interval": [0, 1], "n_intervals": 10
    })"),
                    ParseError);

    // malformed JSON
    CHECK_THROWS_AS(parse_problem("{"), InvalidArgumentError);

    CHECK_THROWS_AS(load_problem(temp_path("does_not_exist.json")), IoError);
}

TEST_CASE("solution CSV round-trips at full precision") {
    const Grid g(0.0, 1.0, 2);
    Solution s{g, {}, {}};
    s.values.push_back(Matrix{{1.0 / 3.0}});
    s.values.push_back(Matrix{{std::sqrt(2.0)}});
    s.values.push_back(Matrix{{-1.2345678901234567e-8}});

    const fs::path path = temp_path("ltvprop_roundtrip.csv");
    write_solution_csv(s, path);

    const CsvSolution back = read_solution_csv(path);
    REQUIRE(back.values.size() == 3);
    CHECK(!back.blow_up_x);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.xs[i] == g.node(i));
        CHECK(back.values[i] == s.values[i]);
    }

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x, v_1_1");
    fs::remove(path);
}

TEST_CASE("solution CSV notes the blow-up and truncates rows") {
    const Grid g(0.0, 1.0, 4);
    Solution s{g, {}, {}};
    s.values.push_back(Matrix{{1.0, 2.0}});
    s.values.push_back(Matrix{{3.0, 4.0}});
    s.meta.blow_up_node = 2;
    s.meta.blow_up_x = 0.5;

    const fs::path path = temp_path("ltvprop_blowup.csv");
    write_solution_csv(s, path);
    const CsvSolution back = read_solution_csv(path);
    CHECK(back.values.size() == 2);
    REQUIRE(back.blow_up_x.has_value());
    CHECK(*back.blow_up_x == 0.5);
    CHECK(back.values[0].cols() == 2);
    fs::remove(path);
}

TEST_CASE("writes are atomic: no temp file left behind") {
    const Grid g(0.0, 1.0, 2);
    Solution s{g, {Matrix{{1.0}}, Matrix{{2.0}}, Matrix{{3.0}}}, {}};
    const fs::path path = temp_path("ltvprop_atomic.csv");
    write_solution_csv(s, path);
    CHECK(fs::exists(path));
    CHECK(!fs::exists(path.string() + ".tmp"));
    fs::remove(path);
}
