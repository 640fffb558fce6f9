#include "mmgeo/tensor.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>

namespace mmgeo {

void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows * cols, "matrix data size does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        require(rows[i].size() == m.cols(), "ragged row list");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

void EmbeddingMatrix::validate() const {
    require(rows() >= 1 && dims() >= 1, "embedding matrix must be non-empty");
    for (std::size_t i = 0; i < rows(); ++i) {
        auto r = values.row(i);
        for (double v : r)
            if (!std::isfinite(v)) throw RowError("non-finite embedding value", i);
        if (unit_norm && std::abs(norm(r) - 1.0) > 1e-9)
            throw RowError("row violates unit-norm contract", i);
    }
}

void PairedEmbeddings::validate(bool unit_norm) const {
    require(x.rows() == y.rows() && x.cols() == y.cols(), "paired matrices differ in shape");
    EmbeddingMatrix{x, unit_norm}.validate();
    EmbeddingMatrix{y, unit_norm}.validate();
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) return {};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

namespace {

Matrix gemm(const Matrix& a, bool ta, const Matrix& b, bool tb) {
    const std::size_t m = ta ? a.cols() : a.rows();
    const std::size_t k = ta ? a.rows() : a.cols();
    const std::size_t kb = tb ? b.cols() : b.rows();
    const std::size_t n = tb ? b.rows() : b.cols();
    require(k == kb, "matmul inner dimensions differ");
    Matrix c(m, n);
    if (m == 0 || n == 0 || k == 0) return c;
    cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans,
                static_cast<int>(m), static_cast<int>(n), static_cast<int>(k), 1.0, a.data(),
                static_cast<int>(a.cols()), b.data(), static_cast<int>(b.cols()), 0.0, c.data(),
                static_cast<int>(n));
    return c;
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) { return gemm(a, false, b, false); }
Matrix matmul_nt(const Matrix& a, const Matrix& b) { return gemm(a, false, b, true); }
Matrix matmul_tn(const Matrix& a, const Matrix& b) { return gemm(a, true, b, false); }

Matrix l2_normalize_rows(const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = out.row(i);
        const double len = norm(r);
        if (!(len > 0.0)) throw RowError("cannot normalize zero-norm row", i);
        for (double& v : r) v /= len;
    }
    return out;
}

Vector row_mean(const Matrix& m) {
    require(m.rows() >= 1, "row_mean needs at least one row");
    Vector mean(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += r[j];
    }
    for (double& v : mean) v /= static_cast<double>(m.rows());
    return mean;
}

Matrix covariance(const Matrix& m) {
    require(m.rows() >= 2, "covariance needs at least two rows");
    const std::size_t n = m.rows(), d = m.cols();
    const Vector mean = row_mean(m);
    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centered(i, j) = m(i, j) - mean[j];

    Matrix c = matmul_tn(centered, centered);
    const double inv_n = 1.0 / static_cast<double>(n);
    // Mirror the upper triangle so the result is symmetric bit-for-bit.
    for (std::size_t i = 0; i < d; ++i) {
        c(i, i) *= inv_n;
        for (std::size_t j = i + 1; j < d; ++j) {
            c(i, j) *= inv_n;
            c(j, i) = c(i, j);
        }
    }
    return c;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    require(u.size() == v.size(), "cosine of vectors with different length");
    const double nu = norm(u), nv = norm(v);
    require(nu > 0.0 && nv > 0.0, "cosine of a zero vector");
    return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

MeanStd mean_pairwise_cosine(const Matrix& m) {
    require(m.rows() >= 2, "pairwise cosine needs at least two rows");
    const Matrix unit = l2_normalize_rows(m);
    const std::size_t n = unit.rows();

    // Blocked Gram products keep memory at block*n regardless of n.
    constexpr std::size_t block = 256;
    double sum = 0.0, sq = 0.0;
    for (std::size_t start = 0; start < n; start += block) {
        const std::size_t stop = std::min(n, start + block);
        Matrix slab(stop - start, unit.cols());
        for (std::size_t i = start; i < stop; ++i)
            std::copy(unit.row(i).begin(), unit.row(i).end(), slab.row(i - start).begin());
        const Matrix g = matmul_nt(slab, unit);
        for (std::size_t i = start; i < stop; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double c = std::clamp(g(i - start, j), -1.0, 1.0);
                sum += c;
                sq += c * c;
            }
    }
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double mean = sum / pairs;
    return {mean, std::sqrt(std::max(0.0, sq / pairs - mean * mean))};
}

Matrix cholesky_solve(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.rows();
    require(a.cols() == n && b.rows() == n, "cholesky_solve shape mismatch");
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        require(diag > 0.0, "matrix is not positive definite");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    Matrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

} // namespace mmgeo
