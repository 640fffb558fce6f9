#pragma once

#include "mmgeo/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace mmgeo {

enum class CorruptionMode { full, span_only };

inline constexpr double kDefaultCorruptionSigma = 0.05;

struct C3Config {
    bool collapse = true;
    bool corrupt = true;
    double sigma = kDefaultCorruptionSigma;
    CorruptionMode mode = CorruptionMode::full;
    // Unit vector; required for span_only, where noise along it is removed.
    std::optional<Vector> gap_direction;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ModalityMeans {
    Vector mean_x;
    Vector mean_y;
};

ModalityMeans compute_means(const Matrix& x, const Matrix& y);

// Each row minus the given mean.
Matrix collapse(const Matrix& m, std::span<const double> mean);

// Adds N(0, sigma^2 I) noise to every row (projected off the gap direction in
// span_only mode). Row i draws from its own stream derived from (seed, i), so
// the result does not depend on evaluation order.
Matrix corrupt(const Matrix& m, const C3Config& cfg);
Vector corrupt_row(std::span<const double> row, std::size_t row_index, const C3Config& cfg);

// Training side (modality y): collapse with mean_y, then corrupt.
Vector c3_train_transform(std::span<const double> e_row, std::size_t row_index, const ModalityMeans& means,
                          const C3Config& cfg);
Matrix c3_train_transform(const Matrix& m, const ModalityMeans& means, const C3Config& cfg);

// Test side (modality x): subtract mean_x, never adds noise.
Vector c3_test_transform(std::span<const double> e_row, const ModalityMeans& means);
Matrix c3_test_transform(const Matrix& m, const ModalityMeans& means);

} // namespace mmgeo
