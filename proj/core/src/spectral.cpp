#include "mmgeo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace mmgeo {

namespace {

// Reduces a (copied) symmetric matrix to tridiagonal form in place with
// Householder reflections; returns diagonal and sub-diagonal.
void tridiagonalize(Matrix& a, Vector& diag, Vector& off) {
    const std::size_t n = a.rows();
    diag.assign(n, 0.0);
    off.assign(n, 0.0);
    Vector v(n), p(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale = std::max(scale, std::abs(a(i, k)));
        if (scale == 0.0) continue;

        double sigma = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            sigma += v[i] * v[i];
        }
        const double alpha = -std::copysign(std::sqrt(sigma), v[k + 1]);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += v[i] * v[i];
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) continue;
        for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

        // A <- H A H with H = I - 2 v v^T, restricted to the trailing block.
        double kk = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            p[i] = s;
            kk += v[i] * s;
        }
        for (std::size_t i = k + 1; i < n; ++i) p[i] -= kk * v[i];
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= 2.0 * (v[i] * p[j] + p[i] * v[j]);

        a(k + 1, k) = a(k, k + 1) = alpha * scale;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) off[i] = a(i + 1, i);
}

// Implicit QL on a symmetric tridiagonal matrix; off[i] couples diag[i], diag[i+1].
void tridiagonal_ql(Vector& d, Vector& e) {
    const int n = static_cast<int>(d.size());
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++iter > 200) throw std::runtime_error("eigenvalue iteration did not converge");

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            int i = m - 1;
            for (; i >= l; --i) {
                const double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (r == 0.0 && i >= l) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
}

} // namespace

Vector symmetric_eigenvalues(const Matrix& c) {
    require(c.rows() == c.cols(), "eigenvalues need a square matrix");
    if (c.rows() == 0) return {};
    Matrix a = c;
    Vector d, e;
    tridiagonalize(a, d, e);
    tridiagonal_ql(d, e);
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
}

std::size_t effective_dimension(const Vector& values, double gamma) {
    require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
    double total = 0.0;
    for (double v : values) total += v;
    if (!(total > 0.0)) return 0;
    // Relative slack absorbs rounding in the running sum (e.g. 99 equal
    // values out of 100 against gamma = 0.99).
    const double target = gamma * total * (1.0 - 1e-12);
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += values[i];
        if (acc >= target) return i + 1;
    }
    return values.size();
}

SpectralSummary spectral_summary(const Matrix& c, double gamma) {
    require(c.rows() == c.cols() && c.rows() >= 1, "covariance must be square and non-empty");
    require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
    const std::size_t d = c.rows();
    double scale = 0.0;
    for (double v : c.values()) {
        require(std::isfinite(v), "covariance contains a non-finite value");
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            require(std::abs(c(i, j) - c(j, i)) <= 1e-12 * std::max(1.0, scale),
                    "covariance is not symmetric");

    SpectralSummary s;
    s.gamma = gamma;
    s.singular_values = symmetric_eigenvalues(c);
    for (double& v : s.singular_values) {
        require(v >= -1e-8 * scale, "covariance is not positive semi-definite");
        v = std::max(v, 0.0);
    }
    for (double v : s.singular_values) s.total += v;
    s.effective_dim = effective_dimension(s.singular_values, gamma);
    return s;
}

} // namespace mmgeo
