#include "mmgeo/c3.hpp"

#include "mmgeo/rng.hpp"

#include <cmath>

namespace mmgeo {

void C3Config::validate() const {
    require(sigma >= 0.0 && std::isfinite(sigma), "corruption sigma must be finite and non-negative");
    if (mode == CorruptionMode::span_only) {
        require(gap_direction.has_value(), "span-only corruption requires a gap direction");
        require(std::abs(norm(*gap_direction) - 1.0) <= 1e-9, "gap direction must be a unit vector");
    }
}

ModalityMeans compute_means(const Matrix& x, const Matrix& y) {
    require(x.rows() >= 1 && y.rows() >= 1, "means need non-empty matrices");
    return {row_mean(x), row_mean(y)};
}

Matrix collapse(const Matrix& m, std::span<const double> mean) {
    require(mean.size() == m.cols(), "mean and embedding width differ");
    Matrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t c = 0; c < r.size(); ++c) r[c] -= mean[c];
    }
    return out;
}

Vector corrupt_row(std::span<const double> row, std::size_t row_index, const C3Config& cfg) {
    cfg.validate();
    if (cfg.mode == CorruptionMode::span_only) require(cfg.gap_direction->size() == row.size(), "gap direction width differs");
    Vector out(row.begin(), row.end());
    if (cfg.sigma == 0.0) return out;

    Rng rng(cfg.seed, row_index);
    Vector eps(row.size());
    for (double& v : eps) v = cfg.sigma * rng.gaussian();
    if (cfg.mode == CorruptionMode::span_only) {
        const Vector& g = *cfg.gap_direction;
        const double along = dot(eps, g);
        for (std::size_t c = 0; c < eps.size(); ++c) eps[c] -= along * g[c];
    }
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += eps[c];
    return out;
}

Matrix corrupt(const Matrix& m, const C3Config& cfg) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Vector r = corrupt_row(m.row(i), i, cfg);
        std::copy(r.begin(), r.end(), out.row(i).begin());
    }
    return out;
}

Vector c3_train_transform(std::span<const double> e_row, std::size_t row_index, const ModalityMeans& means,
                          const C3Config& cfg) {
    cfg.validate();
    Vector v(e_row.begin(), e_row.end());
    if (cfg.collapse) {
        require(means.mean_y.size() == v.size(), "mean and embedding width differ");
        for (std::size_t c = 0; c < v.size(); ++c) v[c] -= means.mean_y[c];
    }
    if (cfg.corrupt) v = corrupt_row(v, row_index, cfg);
    return v;
}

Matrix c3_train_transform(const Matrix& m, const ModalityMeans& means, const C3Config& cfg) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Vector r = c3_train_transform(m.row(i), i, means, cfg);
        std::copy(r.begin(), r.end(), out.row(i).begin());
    }
    return out;
}

Vector c3_test_transform(std::span<const double> e_row, const ModalityMeans& means) {
    require(means.mean_x.size() == e_row.size(), "mean and embedding width differ");
    Vector v(e_row.begin(), e_row.end());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] -= means.mean_x[c];
    return v;
}

Matrix c3_test_transform(const Matrix& m, const ModalityMeans& means) {
    return collapse(m, means.mean_x);
}

} // namespace mmgeo
