#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "ltvprop/series.hpp"
#include "ltvprop/solvers.hpp"

namespace ltvprop {

/// CSV with header "x, v_1_1, v_1_2, ..." (row-major entry order), one row
/// per node at 17 significant digits. A blow-up adds a trailing comment line
/// "# blow_up_x = <value>". Written atomically (temp file + rename).
void write_solution_csv(const Solution& s, const std::filesystem::path& path);

/// Same layout for a propagator table.
void write_table_csv(const PropagatorTable& t, const Grid& grid,
                     const std::filesystem::path& path);

/// A solution CSV read back; dimensions recovered from the header names.
struct CsvSolution {
    std::vector<double> xs;
    std::vector<Matrix> values;
    std::optional<double> blow_up_x;
};

CsvSolution read_solution_csv(const std::filesystem::path& path);

}  // namespace ltvprop
