#include "mmgeo/geometry.hpp"

#include "mmgeo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmgeo {

DimMask DimMask::range(std::size_t begin, std::size_t end) {
    DimMask m;
    for (std::size_t i = begin; i < end; ++i) m.dims.push_back(i);
    return m;
}

PairGroups group_pairs(const PairedEmbeddings& pairs, std::size_t group_size, std::uint64_t seed) {
    require(group_size >= 1, "group size must be positive");
    const std::size_t n = pairs.size();
    require(n >= group_size, "not enough pairs to form a single group");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed, 0x67726f7570ULL);
    std::shuffle(order.begin(), order.end(), rng.engine());

    PairGroups out;
    out.group_size = group_size;
    for (std::size_t start = 0; start < n; start += group_size) {
        const std::size_t stop = std::min(n, start + group_size);
        if (2 * (stop - start) <= group_size) {
            out.dropped = stop - start;
            break;
        }
        out.groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                                order.begin() + static_cast<std::ptrdiff_t>(stop));
    }
    return out;
}

namespace {

constexpr double kDegenerate = 1e-12;

// Cosine that reports degenerate inputs instead of throwing.
bool safe_cosine(std::span<const double> u, std::span<const double> v, double& out) {
    const double nu = norm(u), nv = norm(v);
    if (nu < kDegenerate || nv < kDegenerate) return false;
    out = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    return true;
}

void subtract(std::span<const double> a, std::span<const double> b, Vector& out) {
    out.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
}

} // namespace

GapReport group_statistics(const PairedEmbeddings& pairs, const PairGroups& groups,
                           const GroupStatsOptions& options) {
    require(!groups.groups.empty(), "no groups to analyse");
    require(pairs.x.rows() == pairs.y.rows() && pairs.x.cols() == pairs.y.cols(),
            "paired matrices differ in shape");
    const std::size_t d = pairs.dims();
    const std::size_t g_count = groups.groups.size();

    GapReport report;
    report.groups = g_count;
    report.pairs_per_group = options.pair_samples;

    Matrix group_gap(g_count, d);
    Vector lengths, orthogonality, noise_cos;
    Vector noise_sum(d, 0.0);
    std::size_t noise_count = 0;
    Vector r, eps_j, eps_k;

    for (std::size_t gi = 0; gi < g_count; ++gi) {
        const auto& members = groups.groups[gi];
        const std::size_t g = members.size();
        require(g >= 2, "group needs at least two pairs");

        // d_j = x_j - y_j per member, and d_i as their mean.
        Matrix diffs(g, d);
        for (std::size_t j = 0; j < g; ++j) {
            const std::size_t idx = members[j];
            for (std::size_t c = 0; c < d; ++c) diffs(j, c) = pairs.x(idx, c) - pairs.y(idx, c);
        }
        const Vector mean_diff = row_mean(diffs);
        std::copy(mean_diff.begin(), mean_diff.end(), group_gap.row(gi).begin());
        lengths.push_back(norm(mean_diff));

        // E_j[eps_j] = E_j[d_j] - d_i by linearity; both terms come from the
        // same summation, so the within-group noise mean cancels exactly.
        const Vector eps_mean = row_mean(diffs);
        for (std::size_t c = 0; c < d; ++c)
            noise_sum[c] += (eps_mean[c] - mean_diff[c]) * static_cast<double>(g);
        noise_count += g;

        Rng rng(options.seed, gi);
        for (std::size_t s = 0; s < options.pair_samples; ++s) {
            const std::size_t j = rng.below(g);
            std::size_t k = rng.below(g - 1);
            if (k >= j) ++k;

            double c = 0.0;
            subtract(pairs.x.row(members[j]), pairs.x.row(members[k]), r);
            if (safe_cosine(mean_diff, r, c)) orthogonality.push_back(c);
            else ++report.skipped.gap_orthogonality;

            subtract(diffs.row(j), mean_diff, eps_j);
            subtract(diffs.row(k), mean_diff, eps_k);
            if (safe_cosine(eps_j, eps_k, c)) noise_cos.push_back(c);
            else ++report.skipped.noise_direction;
        }
    }

    Vector direction;
    for (std::size_t i = 0; i < g_count; ++i)
        for (std::size_t j = i + 1; j < g_count; ++j) {
            double c = 0.0;
            if (safe_cosine(group_gap.row(i), group_gap.row(j), c)) direction.push_back(c);
            else ++report.skipped.gap_direction;
        }

    Vector noise_mean(d);
    for (std::size_t c = 0; c < d; ++c) noise_mean[c] = noise_sum[c] / static_cast<double>(noise_count);

    report.gap_length = mean_std(lengths);
    report.gap_direction = mean_std(direction);
    report.gap_orthogonality = mean_std(orthogonality);
    report.noise_mean = mean_std(noise_mean);
    report.noise_direction = mean_std(noise_cos);
    return report;
}

Vector estimate_gap_vector(const PairedEmbeddings& pairs) {
    require(pairs.size() >= 1, "gap estimate needs at least one pair");
    require(pairs.x.cols() == pairs.y.cols(), "paired matrices differ in width");
    Vector gap = row_mean(pairs.x);
    const Vector my = row_mean(pairs.y);
    for (std::size_t c = 0; c < gap.size(); ++c) gap[c] -= my[c];
    return gap;
}

double masked_gap_distance(const PairedEmbeddings& pairs, const DimMask& mask) {
    require(!mask.empty(), "mask must select at least one dimension");
    const Vector gap = estimate_gap_vector(pairs);
    double sq = 0.0;
    for (std::size_t c : mask.dims) {
        require(c < gap.size(), "mask index out of range");
        sq += gap[c] * gap[c];
    }
    return std::sqrt(sq);
}

Vector per_dim_variance(const Matrix& m) {
    require(m.rows() >= 2, "variance needs at least two rows");
    const Vector mean = row_mean(m);
    Vector var(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double dv = m(i, c) - mean[c];
            var[c] += dv * dv;
        }
    for (double& v : var) v /= static_cast<double>(m.rows());
    return var;
}

} // namespace mmgeo
