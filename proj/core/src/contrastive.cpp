#include "mmgeo/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmgeo {

void ContrastiveBatch::validate() const {
    require(tau > 0.0 && std::isfinite(tau), "temperature must be positive");
    require(size() >= 1, "batch must hold at least one pair");
    pairs.validate(unit_norm);
}

double gradient_scale(const ContrastiveBatch& batch) {
    return 1.0 / (2.0 * static_cast<double>(batch.size()) * batch.tau);
}

namespace {

Matrix scaled_similarities(const ContrastiveBatch& batch) {
    Matrix s = matmul_nt(batch.pairs.x, batch.pairs.y);
    const double inv_tau = 1.0 / batch.tau;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (double& v : s.row(i)) v *= inv_tau;
    return s;
}

// Row-wise softmax of s and column-wise softmax of s, both stabilised by
// subtracting the maximum before exponentiating.
void softmaxes(const Matrix& s, Matrix& row_soft, Matrix& col_soft) {
    const std::size_t n = s.rows();
    row_soft = Matrix(n, n);
    col_soft = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = s.row(i);
        const double mx = *std::max_element(r.begin(), r.end());
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) z += (row_soft(i, j) = std::exp(r[j] - mx));
        for (std::size_t j = 0; j < n; ++j) row_soft(i, j) /= z;
    }
    Vector mx(n, -std::numeric_limits<double>::infinity()), z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mx[j] = std::max(mx[j], s(i, j));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) z[j] += (col_soft(i, j) = std::exp(s(i, j) - mx[j]));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) col_soft(i, j) /= z[j];
}

// A = P_yx^T + P_xy; row k of A weighs the y_j in grad_{x_k}.
Matrix alpha_matrix(const ContrastiveBatch& batch) {
    Matrix row_soft, col_soft;
    softmaxes(scaled_similarities(batch), row_soft, col_soft);
    const std::size_t n = batch.size();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = row_soft(i, j) + col_soft(i, j);
    return a;
}

double log_sum_exp(std::span<const double> v) {
    const double mx = *std::max_element(v.begin(), v.end());
    double z = 0.0;
    for (double x : v) z += std::exp(x - mx);
    return mx + std::log(z);
}

std::vector<bool> constant_columns(const Matrix& m) {
    std::vector<bool> constant(m.cols(), true);
    for (std::size_t i = 1; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != m(0, j)) constant[j] = false;
    return constant;
}

// lambda * sum_j w(k, j) (other_j - other_k), using GEMM for the weighted sum
// and writing exact zeros where the other modality is constant.
Matrix compact_form(const Matrix& w, const Matrix& other, double lambda) {
    Matrix g = matmul(w, other);
    const std::vector<bool> constant = constant_columns(other);
    for (std::size_t k = 0; k < g.rows(); ++k) {
        double weight = 0.0;
        for (double v : w.row(k)) weight += v;
        for (std::size_t c = 0; c < g.cols(); ++c)
            g(k, c) = constant[c] ? 0.0 : lambda * (g(k, c) - weight * other(k, c));
    }
    return g;
}

// Crowding factor without the tie check, for internal use on arbitrary batches.
CrowdingFactor crowding_unchecked(std::span<const double> t, double tau, std::size_t m) {
    CrowdingFactor cf;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (i != m) cf.o_prime += std::exp((t[i] - t[m]) / tau);
    // ceil alone can land on 1 when every exponential underflows; with at
    // least one competitor the factor is an integer in (1, n].
    const double ceil_o = std::ceil(cf.o_prime);
    cf.o = t.size() >= 2 ? std::max<std::size_t>(2, static_cast<std::size_t>(ceil_o)) : 1;
    return cf;
}

} // namespace

ConditionalProbs conditional_probs(const ContrastiveBatch& batch) {
    batch.validate();
    Matrix row_soft, col_soft;
    softmaxes(scaled_similarities(batch), row_soft, col_soft);
    // row_soft(j, i) = p(y_i | x_j); col_soft(i, j) = p(x_i | y_j).
    return {std::move(col_soft), row_soft.transposed()};
}

double contrastive_loss(const ContrastiveBatch& batch) {
    batch.validate();
    const Matrix s = scaled_similarities(batch);
    const std::size_t n = batch.size();
    const Matrix st = s.transposed();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += log_sum_exp(s.row(i)) - s(i, i);   // -log p(y_i | x_i)
        total += log_sum_exp(st.row(i)) - s(i, i);  // -log p(x_i | y_i)
    }
    return total / (2.0 * static_cast<double>(n));
}

GradientPair exact_gradients(const ContrastiveBatch& batch) {
    batch.validate();
    const double lambda = gradient_scale(batch);
    Matrix row_soft, col_soft;
    softmaxes(scaled_similarities(batch), row_soft, col_soft);
    const std::size_t n = batch.size();

    // B = A - 2I. The diagonal 2 - A_kk = (1 - p_kk) + (1 - p'_kk) is summed from
    // the off-diagonal probabilities: subtracting from 2 would cancel every
    // significant digit once the matched pairs dominate.
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = row_soft(i, j) + col_soft(i, j);
    for (std::size_t k = 0; k < n; ++k) {
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) off += row_soft(k, j) + col_soft(j, k);
        b(k, k) = -off;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (double& v : b.row(i)) v *= lambda;
    return {matmul(b, batch.pairs.y), matmul_tn(b, batch.pairs.x)};
}

GradientPair compact_gradients(const ContrastiveBatch& batch) {
    batch.validate();
    const double lambda = gradient_scale(batch);
    const Matrix a = alpha_matrix(batch);
    return {compact_form(a, batch.pairs.y, lambda),
            compact_form(a.transposed(), batch.pairs.x, lambda)};
}

double margin(const ContrastiveBatch& batch, std::size_t i) {
    require(batch.size() >= 2, "margin needs at least one negative");
    require(i < batch.size(), "anchor index out of range");
    const auto xi = batch.pairs.x.row(i);
    double hardest = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < batch.size(); ++j)
        if (j != i) hardest = std::max(hardest, dot(xi, batch.pairs.y.row(j)));
    return dot(xi, batch.pairs.y.row(i)) - hardest;
}

CrowdingFactor crowding_factor(std::span<const double> t, double tau) {
    require(!t.empty(), "similarity list is empty");
    require(tau > 0.0, "temperature must be positive");
    const std::size_t m = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
    for (std::size_t i = 0; i < t.size(); ++i)
        require(i == m || t[i] != t[m], "similarity list has a tied maximum");
    return crowding_unchecked(t, tau, m);
}

double stable_region_threshold(std::span<const double> t, double tau, double delta) {
    require(delta > 0.0, "loss threshold must be positive");
    const CrowdingFactor cf = crowding_factor(t, tau);
    return tau * std::log(static_cast<double>(cf.o) / std::expm1(delta));
}

LossBound loss_bound_check(const ContrastiveBatch& batch, std::size_t i, double delta) {
    require(batch.size() >= 2, "loss bound needs at least one negative");
    require(i < batch.size(), "anchor index out of range");
    const double tau = batch.tau;
    const auto xi = batch.pairs.x.row(i);

    Vector sims(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) sims[j] = dot(xi, batch.pairs.y.row(j));
    const double matched = sims[i];
    Vector negatives;
    for (std::size_t j = 0; j < batch.size(); ++j)
        if (j != i) negatives.push_back(sims[j]);
    const std::size_t m =
        static_cast<std::size_t>(std::max_element(negatives.begin(), negatives.end()) - negatives.begin());
    const CrowdingFactor cf = crowding_unchecked(negatives, tau, m);

    LossBound out;
    out.margin = matched - negatives[m];
    Vector scaled(sims.size());
    for (std::size_t j = 0; j < sims.size(); ++j) scaled[j] = sims[j] / tau;
    out.loss = log_sum_exp(scaled) - matched / tau;
    out.bound = std::log1p(static_cast<double>(cf.o) * std::exp(-out.margin / tau));
    out.o = cf.o;
    out.in_stable_region = out.loss <= delta;
    return out;
}

} // namespace mmgeo
