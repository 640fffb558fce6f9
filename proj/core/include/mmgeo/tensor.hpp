#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmgeo {

using Vector = std::vector<double>;

// Row-major dense matrix of doubles. All geometry is computed in 64-bit.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    const std::vector<double>& values() const noexcept { return data_; }

    Matrix transposed() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Precondition failure tied to a specific row (zero-norm row, non-finite value, ...).
class RowError : public std::invalid_argument {
public:
    RowError(const std::string& what, std::size_t row)
        : std::invalid_argument(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// n x d embeddings, one per row, with an optional unit-norm contract.
struct EmbeddingMatrix {
    Matrix values;
    bool unit_norm = false;

    std::size_t rows() const noexcept { return values.rows(); }
    std::size_t dims() const noexcept { return values.cols(); }

    // Throws RowError on a non-finite entry or, when unit_norm is set,
    // a row whose norm is off by more than 1e-9.
    void validate() const;
};

// Two row-aligned modalities: row i of x is paired with row i of y.
struct PairedEmbeddings {
    Matrix x;
    Matrix y;

    std::size_t size() const noexcept { return x.rows(); }
    std::size_t dims() const noexcept { return x.cols(); }
    void validate(bool unit_norm) const;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

// Population mean and standard deviation.
MeanStd mean_std(std::span<const double> values);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

// C = A * B, C = A * B^T, C = A^T * B.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix l2_normalize_rows(const Matrix& m);
Vector row_mean(const Matrix& m);

// Mean-centred population covariance (divides by n).
Matrix covariance(const Matrix& m);

double cosine(std::span<const double> u, std::span<const double> v);

// Statistics over every unordered pair of rows.
MeanStd mean_pairwise_cosine(const Matrix& m);

// Solves (A) x = b for symmetric positive definite A, column by column of B.
Matrix cholesky_solve(const Matrix& a, const Matrix& b);

void require(bool condition, const std::string& message);

} // namespace mmgeo
