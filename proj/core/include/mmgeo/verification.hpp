#pragma once

#include "mmgeo/contrastive.hpp"

#include <cstddef>
#include <cstdint>

namespace mmgeo {

// n x d pairs with independent isotropic unit rows.
ContrastiveBatch random_batch(std::size_t n, std::size_t d, double tau, std::uint64_t seed);

// Central differences of the contrastive loss with rows treated as free variables,
// evaluated in extended precision so the quotient is limited by h, not roundoff.
GradientPair finite_difference_gradients(const ContrastiveBatch& batch, double h = 1e-5);

// max over entries of |a - b| / max(|a|, |b|, floor).
double max_relative_error(const Matrix& a, const Matrix& b, double floor);

// The floor used for gradient checks: entries far below the gradient's own
// scale are compared in absolute terms against 1e-6 of that scale, where
// the differences are dominated by cancellation in the loss evaluation.
double gradient_error_floor(const GradientPair& g);

double max_gradient_relative_error(const GradientPair& analytic, const GradientPair& numeric);

// max |compact - exact - correction| with the correction lambda (1 - sum_i
// p(x_k|y_i)) y_k for x rows and lambda (1 - sum_i p(y_k|x_i)) x_k for y rows.
double compact_identity_error(const ContrastiveBatch& batch);

// x_i = y_i = vertices of a regular simplex scaled onto the sphere, a
// configuration in which every marginal sum_i p(x_k|y_i) equals one.
ContrastiveBatch symmetric_batch(std::size_t n, std::size_t d, double tau);

} // namespace mmgeo
