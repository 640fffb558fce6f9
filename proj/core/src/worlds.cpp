#include "mmgeo/worlds.hpp"

#include "mmgeo/rng.hpp"

#include <algorithm>
#include <cmath>

namespace mmgeo {

namespace {

// Stream identifiers keep every generator's draws independent of one another.
enum Stream : std::uint64_t {
    kBasis = 1,
    kLatent,
    kGap,
    kNoise,
    kConstX,
    kConstY,
    kSampleX,
    kSampleY,
    kInputs,
};

// Removes the components along the given orthonormal rows (twice, for accuracy).
void project_out(Vector& v, const Matrix& basis, std::size_t count) {
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t b = 0; b < count; ++b) {
            const double p = dot(v, basis.row(b));
            for (std::size_t c = 0; c < v.size(); ++c) v[c] -= p * basis(b, c);
        }
}

} // namespace

Matrix random_orthonormal_rows(std::size_t count, std::size_t d, std::uint64_t seed) {
    require(count <= d, "cannot draw more orthonormal rows than dimensions");
    Rng rng(seed, kBasis);
    Matrix basis(count, d);
    Vector v(d);
    for (std::size_t b = 0; b < count; ++b) {
        double len = 0.0;
        do {
            for (double& c : v) c = rng.gaussian();
            project_out(v, basis, b);
            len = norm(v);
        } while (len < 1e-8);
        for (std::size_t c = 0; c < d; ++c) basis(b, c) = v[c] / len;
    }
    return basis;
}

GapWorld make_gap_world(std::size_t n, std::size_t d, std::size_t span_dim, double gap_norm,
                        double sigma, std::uint64_t seed, const GapWorldOptions& options) {
    require(n >= 1 && d >= 1, "world needs at least one row and one dimension");
    require(span_dim >= 1 && span_dim <= d, "span dimension must lie in [1, d]");
    require(gap_norm >= 0.0 && sigma >= 0.0, "gap norm and sigma must be non-negative");
    require(!(gap_norm > 0.0 && span_dim == d), "a non-zero gap needs an orthogonal complement");

    GapWorld w;
    w.true_sigma = sigma;
    w.options = options;
    w.span_basis = random_orthonormal_rows(span_dim, d, seed);

    w.true_gap.assign(d, 0.0);
    if (gap_norm > 0.0) {
        Rng rng(seed, kGap);
        Vector g(d);
        double len = 0.0;
        do {
            for (double& c : g) c = rng.gaussian();
            project_out(g, w.span_basis, span_dim);
            len = norm(g);
        } while (len < 1e-8);
        for (std::size_t c = 0; c < d; ++c) w.true_gap[c] = g[c] / len * gap_norm;
    }

    // y = B^T z / ||z||, unit-norm inside the span.
    Rng latent(seed, kLatent);
    Matrix z(n, span_dim);
    for (std::size_t i = 0; i < n; ++i) {
        double len = 0.0;
        do {
            for (double& v : z.row(i)) v = latent.gaussian();
            len = norm(z.row(i));
        } while (len < 1e-12);
        for (double& v : z.row(i)) v /= len;
    }
    w.pairs.y = matmul(z, w.span_basis);

    Rng noise(seed, kNoise);
    w.pairs.x = Matrix(n, d);
    Vector eps(d), eta(span_dim);
    for (std::size_t i = 0; i < n; ++i) {
        if (options.noise == NoiseSupport::full) {
            for (double& v : eps) v = sigma * noise.gaussian();
        } else {
            for (double& v : eta) v = sigma * noise.gaussian();
            std::fill(eps.begin(), eps.end(), 0.0);
            for (std::size_t b = 0; b < span_dim; ++b)
                for (std::size_t c = 0; c < d; ++c) eps[c] += eta[b] * w.span_basis(b, c);
        }
        for (std::size_t c = 0; c < d; ++c) w.pairs.x(i, c) = w.pairs.y(i, c) + w.true_gap[c] + eps[c];
    }
    if (options.renormalize) w.pairs.x = l2_normalize_rows(w.pairs.x);
    return w;
}

InitSimWorld make_init_sim_world(std::size_t n, std::size_t d, std::size_t dex, std::size_t dey,
                                 std::uint64_t seed) {
    require(n >= 1, "world needs at least one row");
    require(dex + dey <= d, "effective blocks exceed the embedding width");

    InitSimWorld w;
    w.dex = dex;
    w.dey = dey;
    w.constants_x.assign(d, 0.0);
    w.constants_y.assign(d, 0.0);
    auto in_x = [&](std::size_t c) { return c < dex; };
    auto in_y = [&](std::size_t c) { return c >= dex && c < dex + dey; };

    Rng cx(seed, kConstX), cy(seed, kConstY);
    for (std::size_t c = 0; c < d; ++c)
        if (!in_x(c)) w.constants_x[c] = cx.gaussian();
    for (std::size_t c = 0; c < d; ++c)
        if (!in_y(c)) w.constants_y[c] = cy.gaussian();

    w.raw_x = Matrix(n, d);
    w.raw_y = Matrix(n, d);
    Rng sx(seed, kSampleX), sy(seed, kSampleY);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            w.raw_x(i, c) = in_x(c) ? sx.gaussian() : w.constants_x[c];
            w.raw_y(i, c) = in_y(c) ? sy.gaussian() : w.constants_y[c];
        }
    w.pairs.x = l2_normalize_rows(w.raw_x);
    w.pairs.y = l2_normalize_rows(w.raw_y);
    return w;
}

double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed) {
    require(fan_in >= 1 && fan_out >= 1, "fans must be positive");
    const double b = xavier_bound(fan_in, fan_out);
    Rng rng(seed);
    Matrix w(fan_in, fan_out);
    for (std::size_t i = 0; i < fan_in; ++i)
        for (double& v : w.row(i)) v = rng.uniform(-b, b);
    return w;
}

void MlpSimConfig::validate() const {
    require(width >= 1 && inputs >= 2, "MLP needs a positive width and at least two inputs");
    require(probe_stride >= 1, "probe stride must be positive");
    require(depth == 0 || depth >= probe_stride, "depth must reach the first probe");
    require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
}

namespace {

MlpProbe probe(const Matrix& h, std::size_t layer, double gamma) {
    MlpProbe p;
    p.layer = layer;
    p.spectrum = spectral_summary(covariance(h), gamma);

    // Rows that died completely have no direction; the cone statistic is taken
    // over the rows that are still alive.
    std::vector<Vector> alive;
    for (std::size_t i = 0; i < h.rows(); ++i)
        if (norm(h.row(i)) > 0.0) alive.emplace_back(h.row(i).begin(), h.row(i).end());
    p.dead = alive.empty();
    if (alive.size() >= 2) p.cone = mean_pairwise_cosine(Matrix::from_rows(alive));
    return p;
}

} // namespace

std::vector<MlpProbe> mlp_collapse_sim(const MlpSimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed, kInputs);
    Matrix h(cfg.inputs, cfg.width);
    for (std::size_t i = 0; i < cfg.inputs; ++i)
        for (double& v : h.row(i)) v = rng.gaussian();

    std::vector<MlpProbe> probes;
    probes.push_back(probe(h, 0, cfg.gamma));
    for (std::size_t layer = 1; layer <= cfg.depth; ++layer) {
        const Matrix w = xavier_uniform(cfg.width, cfg.width, derive_seed(cfg.seed, layer));
        h = matmul(h, w);
        for (std::size_t i = 0; i < h.rows(); ++i)
            for (double& v : h.row(i)) v = std::max(v, 0.0);
        if (layer % cfg.probe_stride == 0) probes.push_back(probe(h, layer, cfg.gamma));
    }
    return probes;
}

} // namespace mmgeo
