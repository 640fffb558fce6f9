#pragma once

#include "mmgeo/tensor.hpp"

#include <cstddef>
#include <span>

namespace mmgeo {

inline constexpr double kDefaultTemperature = 0.07;

// Paired unit-norm embeddings plus the softmax temperature.
struct ContrastiveBatch {
    PairedEmbeddings pairs;
    double tau = kDefaultTemperature;
    // Rows are unit-norm within 1e-9. Unconstrained descent clears this to
    // evaluate the same loss on rows that have left the sphere.
    bool unit_norm = true;

    std::size_t size() const noexcept { return pairs.size(); }
    void validate() const;
};

// p_xy(i, j) = p(x_i | y_j), p_yx(i, j) = p(y_i | x_j). Every column sums to one.
struct ConditionalProbs {
    Matrix p_xy;
    Matrix p_yx;
};

struct GradientPair {
    Matrix grad_x;
    Matrix grad_y;
};

ConditionalProbs conditional_probs(const ContrastiveBatch& batch);

// Symmetric InfoNCE: -(1/2n) sum_i [log p(y_i|x_i) + log p(x_i|y_i)].
double contrastive_loss(const ContrastiveBatch& batch);

// True gradient with every embedding row treated as a free variable.
GradientPair exact_gradients(const ContrastiveBatch& batch);

// Compact form grad_{x_k} = lambda * sum_j alpha_kj (y_j - y_k). It assumes
// sum_i p(x_k|y_i) = 1 and differs from the exact gradient by
// lambda (1 - sum_i p(x_k|y_i)) y_k otherwise. In a coordinate where the
// other modality is constant every (y_j - y_k) term vanishes, and the result
// is exactly zero there.
GradientPair compact_gradients(const ContrastiveBatch& batch);

// lambda = 1 / (2 n tau).
double gradient_scale(const ContrastiveBatch& batch);

// Matched similarity of anchor x_i minus its hardest negative.
double margin(const ContrastiveBatch& batch, std::size_t i);

struct CrowdingFactor {
    double o_prime = 1.0;  // 1 + sum_{i != m} exp((t_i - t_m) / tau)
    std::size_t o = 1;     // ceil(o_prime), never below 2 with a negative present
};

// Rejects an empty list and a tied maximum.
CrowdingFactor crowding_factor(std::span<const double> t, double tau);

// Margin above which the per-anchor loss is at most delta:
// tau * log(o / (exp(delta) - 1)).
double stable_region_threshold(std::span<const double> t, double tau, double delta);

struct LossBound {
    double loss = 0.0;   // -log p(y_i | x_i)
    double bound = 0.0;  // log(1 + o exp(-r / tau))
    double margin = 0.0;
    std::size_t o = 1;
    bool in_stable_region = false; // loss <= delta
};

// o is the crowding factor of anchor i's negatives, the list the bound sums over.
LossBound loss_bound_check(const ContrastiveBatch& batch, std::size_t i, double delta);

} // namespace mmgeo
