#pragma once

#include <initializer_list>
#include <vector>

#include "ltvprop/errors.hpp"

namespace ltvprop {

/// Dense real matrix, row-major doubles. Entries are validated to be finite
/// at construction so downstream failures are structural, never silent NaNs.
class Matrix {
public:
    Matrix() = default;

    /// rows x cols zero matrix.
    Matrix(int rows, int cols);

    /// From a row-major entry list of length rows*cols.
    Matrix(int rows, int cols, std::vector<double> entries);

    /// From nested braces: Matrix{{1,2},{3,4}}.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double operator()(int r, int c) const { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }
    double& operator()(int r, int c) { return entries_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<double>& entries() const { return entries_; }

    double trace() const;
    Matrix transpose() const;

    /// Copy of the nrows x ncols sub-block anchored at (r0, c0).
    Matrix block(int r0, int c0, int nrows, int ncols) const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator-(const Matrix& a) { Matrix r = a; return r *= -1.0; }

    /// Matrix product; throws DimensionError naming both shapes.
    friend Matrix operator*(const Matrix& a, const Matrix& b);

    bool operator==(const Matrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> entries_;

    void check_finite() const;
};

/// [a; b] stacked vertically (column counts must agree).
Matrix vstack(const Matrix& a, const Matrix& b);

/// [a, b] side by side (row counts must agree).
Matrix hstack(const Matrix& a, const Matrix& b);

/// Max absolute entry; the norm used throughout the library.
double norm_max(const Matrix& a);

/// Determinant via LU with partial pivoting; exact zero for rank-deficient input.
double det(const Matrix& a);

/// Inverse via LU with partial pivoting. A pivot below 1e-14 * max|entry|
/// raises SingularMatrixError carrying the pivot index.
Matrix inverse(const Matrix& a);

/// Matrix exponential by scaling-and-squaring with a truncated Taylor core.
/// Relative error below 1e-12 for norm_max up to ~10; used only as a
/// constant-coefficient cross-check, never in the series path.
Matrix expm(const Matrix& a);

}  // namespace ltvprop
