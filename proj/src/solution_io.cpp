#include "ltvprop/solution_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace ltvprop {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_rows(std::ostream& out, const std::vector<double>& xs,
                const std::vector<Matrix>& values, std::optional<double> blow_up_x) {
    const int rows = values.front().rows();
    const int cols = values.front().cols();
    out << "x";
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out << ", v_" << (r + 1) << "_" << (c + 1);
    out << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << fmt17(xs[i]);
        for (double v : values[i].entries()) out << ", " << fmt17(v);
        out << "\n";
    }
    if (blow_up_x) out << "# blow_up_x = " << fmt17(*blow_up_x) << "\n";
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write to " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                          ec.message());
}

}  // namespace

void write_solution_csv(const Solution& s, const std::filesystem::path& path) {
    if (s.values.empty()) throw InvalidArgumentError("solution has no values to write");
    std::vector<double> xs;
    xs.reserve(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) xs.push_back(s.grid.node(static_cast<int>(i)));
    std::ostringstream out;
    write_rows(out, xs, s.values, s.meta.blow_up_x);
    atomic_write(path, out.str());
}

void write_table_csv(const PropagatorTable& t, const Grid& grid,
                     const std::filesystem::path& path) {
    std::vector<double> xs;
    xs.reserve(t.values.size());
    for (std::size_t i = 0; i < t.values.size(); ++i) xs.push_back(grid.node(static_cast<int>(i)));
    std::ostringstream out;
    write_rows(out, xs, t.values, std::nullopt);
    atomic_write(path, out.str());
}

CsvSolution read_solution_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV: " + path.string());

    // Header names v_R_C carry the shape.
    int rows = 0, cols = 0, fields = 0;
    {
        std::istringstream header(line);
        std::string tok;
        while (std::getline(header, tok, ',')) {
            const std::size_t start = tok.find_first_not_of(" \t");
            if (start == std::string::npos) continue;
            tok = tok.substr(start);
            if (tok == "x") continue;
            int r = 0, c = 0;
            if (std::sscanf(tok.c_str(), "v_%d_%d", &r, &c) != 2)
                throw IoError("unexpected CSV header field '" + tok + "' in " + path.string());
            rows = std::max(rows, r);
            cols = std::max(cols, c);
            ++fields;
        }
    }
    if (fields != rows * cols)
        throw IoError("CSV header of " + path.string() + " does not enumerate a full matrix");

    CsvSolution out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            double bx = 0.0;
            if (std::sscanf(line.c_str(), "# blow_up_x = %lf", &bx) == 1) out.blow_up_x = bx;
            continue;
        }
        std::istringstream row(line);
        std::string tok;
        std::vector<double> nums;
        while (std::getline(row, tok, ',')) nums.push_back(std::strtod(tok.c_str(), nullptr));
        if (static_cast<int>(nums.size()) != fields + 1)
            throw IoError("CSV row with " + std::to_string(nums.size()) + " fields, expected " +
                          std::to_string(fields + 1) + " in " + path.string());
        out.xs.push_back(nums[0]);
        out.values.emplace_back(rows, cols, std::vector<double>(nums.begin() + 1, nums.end()));
    }
    return out;
}

}  // namespace ltvprop
