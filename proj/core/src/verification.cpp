#include "mmgeo/verification.hpp"

#include "mmgeo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mmgeo {

ContrastiveBatch random_batch(std::size_t n, std::size_t d, double tau, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, d), y(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x.row(i)) v = rng.gaussian();
        for (double& v : y.row(i)) v = rng.gaussian();
    }
    return {{l2_normalize_rows(x), l2_normalize_rows(y)}, tau};
}

namespace {

// Symmetric InfoNCE in extended precision with coordinate (i, c) of one modality
// shifted by `delta`. At small temperatures the loss reaches O(100), and double
// roundoff divided by 2h would otherwise dominate the difference quotient.
long double shifted_loss(const ContrastiveBatch& batch, bool shift_x, std::size_t i, std::size_t c,
                         long double delta) {
    const std::size_t n = batch.size(), d = batch.pairs.dims();
    const Matrix& x = batch.pairs.x;
    const Matrix& y = batch.pairs.y;
    auto xv = [&](std::size_t r, std::size_t k) {
        return static_cast<long double>(x(r, k)) + (shift_x && r == i && k == c ? delta : 0.0L);
    };
    auto yv = [&](std::size_t r, std::size_t k) {
        return static_cast<long double>(y(r, k)) + (!shift_x && r == i && k == c ? delta : 0.0L);
    };
    const long double tau = batch.tau;
    std::vector<long double> s(n * n, 0.0L);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t q = 0; q < n; ++q) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < d; ++k) acc += xv(r, k) * yv(q, k);
            s[r * n + q] = acc / tau;
        }
    // -log p = log sum_q exp(s_q - s_matched), taken relative to the largest
    // exponent so a dominant matched pair keeps full relative precision.
    auto anchor_loss = [&](std::size_t a, bool by_row) {
        auto at = [&](std::size_t q) { return by_row ? s[a * n + q] : s[q * n + a]; };
        const long double matched = at(a);
        std::size_t top = 0;
        for (std::size_t q = 1; q < n; ++q)
            if (at(q) > at(top)) top = q;
        const long double m = at(top) - matched;
        long double rest = 0.0L;
        for (std::size_t q = 0; q < n; ++q)
            if (q != top) rest += std::exp(at(q) - matched - m);
        return m + std::log1p(rest);
    };
    long double total = 0.0L;
    for (std::size_t r = 0; r < n; ++r) total += anchor_loss(r, true) + anchor_loss(r, false);
    return total / (2.0L * static_cast<long double>(n));
}

} // namespace

GradientPair finite_difference_gradients(const ContrastiveBatch& batch, double h) {
    require(h > 0.0, "finite-difference step must be positive");
    const std::size_t n = batch.size(), d = batch.pairs.dims();
    GradientPair g{Matrix(n, d), Matrix(n, d)};
    const long double step = h;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            g.grad_x(i, c) = static_cast<double>(
                (shifted_loss(batch, true, i, c, step) - shifted_loss(batch, true, i, c, -step)) / (2.0L * step));
            g.grad_y(i, c) = static_cast<double>(
                (shifted_loss(batch, false, i, c, step) - shifted_loss(batch, false, i, c, -step)) / (2.0L * step));
        }
    return g;
}

double max_relative_error(const Matrix& a, const Matrix& b, double floor) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        const double u = a.values()[i], v = b.values()[i];
        worst = std::max(worst, std::abs(u - v) / std::max({std::abs(u), std::abs(v), floor}));
    }
    return worst;
}

double gradient_error_floor(const GradientPair& g) {
    double scale = 0.0;
    for (double v : g.grad_x.values()) scale = std::max(scale, std::abs(v));
    for (double v : g.grad_y.values()) scale = std::max(scale, std::abs(v));
    return std::max(1e-6 * scale, 1e-300);
}

double max_gradient_relative_error(const GradientPair& analytic, const GradientPair& numeric) {
    const double floor = gradient_error_floor(analytic);
    return std::max(max_relative_error(analytic.grad_x, numeric.grad_x, floor),
                    max_relative_error(analytic.grad_y, numeric.grad_y, floor));
}

double compact_identity_error(const ContrastiveBatch& batch) {
    const GradientPair exact = exact_gradients(batch);
    const GradientPair compact = compact_gradients(batch);
    const ConditionalProbs p = conditional_probs(batch);
    const double lambda = gradient_scale(batch);
    const std::size_t n = batch.size(), d = batch.pairs.dims();

    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += p.p_xy(k, i);
            sy += p.p_yx(k, i);
        }
        for (std::size_t c = 0; c < d; ++c) {
            const double cx = lambda * (1.0 - sx) * batch.pairs.y(k, c);
            const double cy = lambda * (1.0 - sy) * batch.pairs.x(k, c);
            worst = std::max(worst, std::abs(compact.grad_x(k, c) - exact.grad_x(k, c) - cx));
            worst = std::max(worst, std::abs(compact.grad_y(k, c) - exact.grad_y(k, c) - cy));
        }
    }
    return worst;
}

ContrastiveBatch symmetric_batch(std::size_t n, std::size_t d, double tau) {
    require(n >= 1 && d >= n, "symmetric configuration needs d >= n");
    // Centred standard basis vectors e_i - 1/n, normalised: a regular simplex.
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < n; ++c) m(i, c) = (i == c ? 1.0 : 0.0) - (n > 1 ? 1.0 / static_cast<double>(n) : 0.0);
    if (n == 1) m(0, 0) = 1.0;
    const Matrix unit = l2_normalize_rows(m);
    return {{unit, unit}, tau};
}

} // namespace mmgeo
