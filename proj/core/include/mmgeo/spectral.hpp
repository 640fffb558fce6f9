#pragma once

#include "mmgeo/tensor.hpp"

#include <cstddef>

namespace mmgeo {

inline constexpr double kDefaultGamma = 0.99;

struct SpectralSummary {
    Vector singular_values; // non-increasing, >= 0
    double total = 0.0;
    double gamma = kDefaultGamma;
    // Smallest d' whose leading values explain at least gamma of the total.
    // 0 is a sentinel for an all-zero spectrum (nothing to explain).
    std::size_t effective_dim = 0;
};

// Eigenvalues of a symmetric matrix, sorted non-increasing.
// Householder tridiagonalisation followed by implicit-shift QL.
Vector symmetric_eigenvalues(const Matrix& c);

// Effective dimension of an already sorted, non-negative spectrum.
std::size_t effective_dimension(const Vector& sorted_values, double gamma);

// Spectrum of a covariance matrix. Rejects non-square, non-finite,
// asymmetric or clearly indefinite input.
SpectralSummary spectral_summary(const Matrix& c, double gamma = kDefaultGamma);

} // namespace mmgeo
