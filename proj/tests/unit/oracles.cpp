#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace oracle {

Vector jacobi_eigenvalues(const Matrix& c) {
    const std::size_t n = c.rows();
    std::vector<long double> a(n * n);
    for (std::size_t i = 0; i < n * n; ++i) a[i] = c.values()[i];
    auto at = [&](std::size_t i, std::size_t j) -> long double& { return a[i * n + j]; };

    long double frob = 0.0L;
    for (long double v : a) frob += v * v;
    frob = std::sqrt(frob);

    for (int sweep = 0; sweep < 100; ++sweep) {
        long double off = 0.0L;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(p, q)));
        if (off <= 1e-15L * frob) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (at(p, q) == 0.0L) continue;
                const long double theta = (at(q, q) - at(p, p)) / (2.0L * at(p, q));
                const long double t = (theta >= 0 ? 1.0L : -1.0L) / (std::abs(theta) + std::sqrt(theta * theta + 1.0L));
                const long double cs = 1.0L / std::sqrt(t * t + 1.0L), sn = t * cs;
                for (std::size_t k = 0; k < n; ++k) {
                    const long double akp = at(k, p), akq = at(k, q);
                    at(k, p) = cs * akp - sn * akq;
                    at(k, q) = sn * akp + cs * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const long double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = cs * apk - sn * aqk;
                    at(q, k) = sn * apk + cs * aqk;
                }
            }
    }
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(at(i, i));
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

Matrix covariance(const Matrix& m) {
    const std::size_t n = m.rows(), d = m.cols();
    Vector mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) mean[c] += m(i, c) / static_cast<double>(n);
    Matrix out(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += (m(i, a) - mean[a]) * (m(i, b) - mean[b]);
            out(a, b) = s / static_cast<double>(n);
        }
    return out;
}

namespace {

long double similarity(const Matrix& x, const Matrix& y, std::size_t i, std::size_t j) {
    long double s = 0.0L;
    for (std::size_t c = 0; c < x.cols(); ++c) s += static_cast<long double>(x(i, c)) * y(j, c);
    return s;
}

} // namespace

Matrix column_softmax(const Matrix& x, const Matrix& y, double tau) {
    const std::size_t n = x.rows();
    Matrix p(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        long double z = 0.0L;
        for (std::size_t k = 0; k < n; ++k) z += std::exp(similarity(x, y, k, j) / tau);
        for (std::size_t i = 0; i < n; ++i) p(i, j) = static_cast<double>(std::exp(similarity(x, y, i, j) / tau) / z);
    }
    return p;
}

double contrastive_loss(const Matrix& x, const Matrix& y, double tau) {
    const std::size_t n = x.rows();
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        long double zy = 0.0L, zx = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            zy += std::exp(similarity(x, y, i, j) / tau);
            zx += std::exp(similarity(x, y, j, i) / tau);
        }
        const long double matched = std::exp(similarity(x, y, i, i) / tau);
        total -= std::log(matched / zy) + std::log(matched / zx);
    }
    return static_cast<double>(total / (2.0L * n));
}

Matrix gd_ridge(const Matrix& inputs, const Matrix& targets, double lambda, std::size_t iterations) {
    const std::size_t n = inputs.rows(), d = inputs.cols(), m = targets.cols();
    // Objective (1/n) sum ||W^T x + b - t||^2 + (lambda/n) ||W||^2, step from a
    // bound on the Hessian's largest eigenvalue.
    double scale = 0.0;
    for (double v : inputs.values()) scale += v * v;
    const double step = 0.5 / (2.0 * (scale / static_cast<double>(n) + 1.0 + lambda / static_cast<double>(n)));
    Matrix w(d + 1, m);
    Matrix grad(d + 1, m);
    for (std::size_t it = 0; it < iterations; ++it) {
        grad = Matrix(d + 1, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k) {
                double r = w(d, k) - targets(i, k);
                for (std::size_t c = 0; c < d; ++c) r += w(c, k) * inputs(i, c);
                for (std::size_t c = 0; c < d; ++c) grad(c, k) += 2.0 * r * inputs(i, c) / static_cast<double>(n);
                grad(d, k) += 2.0 * r / static_cast<double>(n);
            }
        for (std::size_t c = 0; c < d; ++c)
            for (std::size_t k = 0; k < m; ++k) grad(c, k) += 2.0 * lambda * w(c, k) / static_cast<double>(n);
        for (std::size_t i = 0; i < w.values().size(); ++i) w.data()[i] -= step * grad.values()[i];
    }
    return w;
}

Matrix random_gaussian(std::size_t rows, std::size_t cols, unsigned seed) {
    std::minstd_rand eng(seed);
    std::normal_distribution<double> nd;
    Matrix m(rows, cols);
    for (double& v : std::span<double>(m.data(), rows * cols)) v = nd(eng);
    return m;
}

} // namespace oracle
