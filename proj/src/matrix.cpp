#include "ltvprop/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

namespace ltvprop {

namespace {

std::string shape_of(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shapes " + shape_of(a) +
                             " and " + shape_of(b) + " differ");
    }
}

void require_square(const Matrix& a, const char* op) {
    if (!a.square()) {
        throw DimensionError(std::string(op) + ": matrix is " + shape_of(a) +
                             ", expected square");
    }
}

// Relative pivot threshold below which a matrix counts as singular.
constexpr double kSingularTol = 1e-14;

struct LuFactors {
    Matrix lu;               // L (unit diagonal, below) and U (diagonal and above)
    std::vector<int> perm;   // row permutation applied to the input
    int sign = 1;            // parity of the permutation
    int singular_at = -1;    // first pivot index below threshold, -1 if none
};

LuFactors lu_factor(const Matrix& a) {
    const int n = a.rows();
    LuFactors f{a, std::vector<int>(n), 1, -1};
    for (int i = 0; i < n; ++i) f.perm[i] = i;

    const double threshold = kSingularTol * norm_max(a);

    for (int k = 0; k < n; ++k) {
        int pivot_row = k;
        double pivot_mag = std::fabs(f.lu(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double mag = std::fabs(f.lu(r, k));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if (pivot_mag <= threshold && f.singular_at < 0) {
            f.singular_at = k;
            if (pivot_mag == 0.0) break;  // cannot eliminate with an exact zero pivot
        }
        if (pivot_row != k) {
            for (int c = 0; c < n; ++c) std::swap(f.lu(k, c), f.lu(pivot_row, c));
            std::swap(f.perm[k], f.perm[pivot_row]);
            f.sign = -f.sign;
        }
        const double pivot = f.lu(k, k);
        for (int r = k + 1; r < n; ++r) {
            const double factor = f.lu(r, k) / pivot;
            f.lu(r, k) = factor;
            for (int c = k + 1; c < n; ++c) f.lu(r, c) -= factor * f.lu(k, c);
        }
    }
    return f;
}

// Solves LU y = e_{perm} for each unit vector, writing columns of the inverse.
Matrix lu_inverse(const LuFactors& f) {
    const int n = f.lu.rows();
    Matrix inv(n, n);
    std::vector<double> y(n);
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < n; ++i) y[i] = (f.perm[i] == col) ? 1.0 : 0.0;
        for (int i = 1; i < n; ++i) {
            double s = y[i];
            for (int j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
            y[i] = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * y[j];
            y[i] = s / f.lu(i, i);
        }
        for (int i = 0; i < n; ++i) inv(i, col) = y[i];
    }
    return inv;
}

}  // namespace

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows <= 0 || cols <= 0) {
        throw DimensionError("matrix dimensions must be positive, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows <= 0 || cols <= 0) {
        throw DimensionError("matrix dimensions must be positive, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (entries_.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionError("entry count " + std::to_string(entries_.size()) +
                             " does not match shape " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    check_finite();
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    if (rows_ == 0 || cols_ == 0) {
        throw DimensionError("matrix literal must be non-empty");
    }
    entries_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != cols_) {
            throw DimensionError("ragged matrix literal");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
    check_finite();
}

void Matrix::check_finite() const {
    for (double v : entries_) {
        if (!std::isfinite(v)) {
            throw NonFiniteError("non-finite matrix entry rejected");
        }
    }
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double Matrix::trace() const {
    require_square(*this, "trace");
    double t = 0.0;
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

Matrix Matrix::transpose() const {
    Matrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

Matrix Matrix::block(int r0, int c0, int nrows, int ncols) const {
    if (r0 < 0 || c0 < 0 || r0 + nrows > rows_ || c0 + ncols > cols_) {
        throw DimensionError("block [" + std::to_string(r0) + ":" +
                             std::to_string(r0 + nrows) + ", " + std::to_string(c0) +
                             ":" + std::to_string(c0 + ncols) +
                             "] outside matrix of shape " + shape_of(*this));
    }
    Matrix r(nrows, ncols);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "add");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "subtract");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : entries_) v *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("multiply: inner dimensions of " + shape_of(a) +
                             " and " + shape_of(b) + " do not match");
    }
    Matrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("vstack: column counts of " + shape_of(a) + " and " +
                             shape_of(b) + " differ");
    }
    Matrix r(a.rows() + b.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) r(a.rows() + i, j) = b(i, j);
    return r;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("hstack: row counts of " + shape_of(a) + " and " +
                             shape_of(b) + " differ");
    }
    Matrix r(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
        for (int j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
    }
    return r;
}

double norm_max(const Matrix& a) {
    double m = 0.0;
    for (double v : a.entries()) m = std::max(m, std::fabs(v));
    return m;
}

double det(const Matrix& a) {
    require_square(a, "det");
    const LuFactors f = lu_factor(a);
    double d = static_cast<double>(f.sign);
    for (int i = 0; i < a.rows(); ++i) {
        if (f.singular_at >= 0 && f.lu(i, i) == 0.0) return 0.0;
        d *= f.lu(i, i);
    }
    return d;
}

Matrix inverse(const Matrix& a) {
    require_square(a, "inverse");
    const LuFactors f = lu_factor(a);
    if (f.singular_at >= 0) {
        throw SingularMatrixError(
            "matrix singular to working precision at pivot " +
                std::to_string(f.singular_at),
            f.singular_at);
    }
    return lu_inverse(f);
}

Matrix expm(const Matrix& a) {
    require_square(a, "expm");
    const int n = a.rows();

    // Halve until the scaled norm is small, run the Taylor series to full
    // precision, then square back up.
    int squarings = 0;
    double nrm = norm_max(a) * n;  // crude bound on the operator norm
    while (nrm > 0.5 && squarings < 60) {
        nrm *= 0.5;
        ++squarings;
    }
    Matrix scaled = a * std::ldexp(1.0, -squarings);

    Matrix sum = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = term * scaled;
        term *= 1.0 / k;
        sum += term;
        if (norm_max(term) <= 1e-18 * norm_max(sum)) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

}  // namespace ltvprop
