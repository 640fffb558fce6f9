#include "mmgeo/crossmodal.hpp"

#include "mmgeo/geometry.hpp"
#include "mmgeo/rng.hpp"
#include "mmgeo/worlds.hpp"

#include <algorithm>
#include <cmath>

namespace mmgeo {

namespace {

enum Stream : std::uint64_t {
    kTaskBasis = 11,
    kCentroids,
    kLabels,
    kLatents,
    kBase,
    kJitter,
    kGapDraw,
    kAlign,
    kShift,
};

Vector random_unit_in(const Matrix& basis, Rng& rng) {
    Vector coeff(basis.rows());
    double len = 0.0;
    do {
        for (double& c : coeff) c = rng.gaussian();
        len = norm(coeff);
    } while (len < 1e-12);
    Vector v(basis.cols(), 0.0);
    for (std::size_t b = 0; b < basis.rows(); ++b)
        for (std::size_t c = 0; c < basis.cols(); ++c) v[c] += coeff[b] / len * basis(b, c);
    return v;
}

} // namespace

void ToyTaskSpec::validate() const {
    require(d >= 1 && span_dim >= 1 && span_dim <= d, "span dimension must lie in [1, d]");
    require(classes >= 2 && classes <= span_dim, "classes must fit in the span");
    require(!(gap_norm > 0.0 && span_dim == d), "a non-zero gap needs an orthogonal complement");
    require(gap_norm >= 0.0 && sigma_align >= 0.0 && class_spread >= 0.0 && ineffective_std >= 0.0 &&
                base_offset_std >= 0.0,
            "task scales must be non-negative");
    require(train_fraction > 0.0 && train_fraction < 1.0, "train fraction must lie in (0, 1)");
    const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * train_fraction);
    require(n_train >= 1 && n_train < n, "split leaves an empty side");
}

ToyTask make_toy_task(const ToyTaskSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n, d = spec.d, k = spec.span_dim, K = spec.classes;

    ToyTask task;
    task.spec = spec;
    const Matrix q = random_orthonormal_rows(d, d, derive_seed(spec.seed, kTaskBasis));
    task.span_basis = Matrix(k, d);
    task.complement_basis = Matrix(d - k, d);
    for (std::size_t b = 0; b < d; ++b) {
        auto dst = b < k ? task.span_basis.row(b) : task.complement_basis.row(b - k);
        std::copy(q.row(b).begin(), q.row(b).end(), dst.begin());
    }

    // Unit-norm class centroids in span coordinates.
    Rng cr(spec.seed, kCentroids);
    Matrix centroids(K, k);
    for (std::size_t c = 0; c < K; ++c) {
        for (double& v : centroids.row(c)) v = cr.gaussian();
        const double len = norm(centroids.row(c));
        for (double& v : centroids.row(c)) v /= len;
    }

    Rng lr(spec.seed, kLabels);
    task.labels.resize(n);
    for (auto& l : task.labels) l = lr.below(K);

    Rng zr(spec.seed, kLatents);
    Matrix z(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c) z(i, c) = centroids(task.labels[i], c) + spec.class_spread * zr.gaussian();

    // Complement coordinates: shared offset plus per-row jitter.
    Rng br(spec.seed, kBase), jr(spec.seed, kJitter);
    Vector base(d - k);
    for (double& v : base) v = spec.base_offset_std * br.gaussian();
    Matrix w(n, d - k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d - k; ++c) w(i, c) = base[c] + spec.ineffective_std * jr.gaussian();

    task.pairs.y = matmul(z, task.span_basis);
    if (d > k) {
        const Matrix off = matmul(w, task.complement_basis);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) task.pairs.y(i, c) += off(i, c);
    }

    task.true_gap.assign(d, 0.0);
    if (spec.gap_norm > 0.0) {
        Rng gr(spec.seed, kGapDraw);
        const Vector u = random_unit_in(task.complement_basis, gr);
        for (std::size_t c = 0; c < d; ++c) task.true_gap[c] = spec.gap_norm * u[c];
    }

    Rng ar(spec.seed, kAlign);
    task.pairs.x = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c)
            task.pairs.x(i, c) = task.pairs.y(i, c) + task.true_gap[c] + spec.sigma_align * ar.gaussian();

    const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * spec.train_fraction);
    for (std::size_t i = 0; i < n; ++i) (i < n_train ? task.train : task.test).push_back(i);
    return task;
}

Matrix RidgeDecoder::predict(const Matrix& inputs) const {
    require(inputs.cols() == weights.rows(), "decoder input width differs");
    Matrix out = matmul(inputs, weights);
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t c = 0; c < out.cols(); ++c) out(i, c) += bias[c];
    return out;
}

std::vector<std::size_t> RidgeDecoder::classify(const Matrix& inputs) const {
    const Matrix scores = predict(inputs);
    std::vector<std::size_t> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        auto r = scores.row(i);
        out[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return out;
}

RidgeDecoder train_decoder(const Matrix& inputs, const Matrix& targets, double lambda) {
    require(lambda > 0.0, "ridge regularisation must be positive");
    require(inputs.rows() == targets.rows() && inputs.rows() >= 1, "inputs and targets differ in length");
    const Vector mx = row_mean(inputs);
    const Vector mt = row_mean(targets);
    const Matrix xc = collapse(inputs, mx);
    const Matrix tc = collapse(targets, mt);

    Matrix gram = matmul_tn(xc, xc);
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += lambda;
    RidgeDecoder dec;
    dec.lambda = lambda;
    dec.weights = cholesky_solve(gram, matmul_tn(xc, tc));
    dec.bias = mt;
    for (std::size_t c = 0; c < dec.bias.size(); ++c)
        for (std::size_t j = 0; j < mx.size(); ++j) dec.bias[c] -= mx[j] * dec.weights(j, c);
    return dec;
}

RidgeDecoder train_classifier(const Matrix& inputs, const std::vector<std::size_t>& labels,
                              std::size_t classes, double lambda) {
    require(labels.size() == inputs.rows(), "one label per row is required");
    Matrix onehot(labels.size(), classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] < classes, "label out of range");
        onehot(i, labels[i]) = 1.0;
    }
    return train_decoder(inputs, onehot, lambda);
}

double accuracy(const RidgeDecoder& decoder, const Matrix& inputs, const std::vector<std::size_t>& labels) {
    require(labels.size() == inputs.rows() && !labels.empty(), "one label per row is required");
    const auto predicted = decoder.classify(inputs);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(m.row(rows[i]).begin(), m.row(rows[i]).end(), out.row(i).begin());
    return out;
}

std::vector<std::size_t> select(const std::vector<std::size_t>& values, const std::vector<std::size_t>& rows) {
    std::vector<std::size_t> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(values[r]);
    return out;
}

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> v = {Variant::C1, Variant::C21, Variant::C22, Variant::C22SpanOnly,
                                           Variant::C3};
    return v;
}

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::C1: return "C1";
    case Variant::C21: return "C2_1";
    case Variant::C22: return "C2_2";
    case Variant::C22SpanOnly: return "C2_2_span_only";
    case Variant::C3: return "C3";
    }
    return "unknown";
}

bool variant_collapses(Variant v) { return v == Variant::C21 || v == Variant::C3; }
bool variant_corrupts(Variant v) { return v == Variant::C22 || v == Variant::C22SpanOnly || v == Variant::C3; }

ModalityMeans task_means(const ToyTask& task) {
    return {row_mean(select_rows(task.pairs.x, task.test)), row_mean(select_rows(task.pairs.y, task.train))};
}

C3Config variant_config(Variant v, const ToyTask& task, double train_sigma, std::uint64_t noise_seed) {
    C3Config cfg;
    cfg.collapse = variant_collapses(v);
    cfg.corrupt = variant_corrupts(v);
    cfg.sigma = train_sigma;
    cfg.seed = noise_seed;
    if (v == Variant::C22SpanOnly) {
        const ModalityMeans m = task_means(task);
        Vector g(m.mean_x.size());
        for (std::size_t c = 0; c < g.size(); ++c) g[c] = m.mean_x[c] - m.mean_y[c];
        const double len = norm(g);
        require(len > 0.0, "span-only corruption needs a non-zero gap estimate");
        for (double& c : g) c /= len;
        cfg.mode = CorruptionMode::span_only;
        cfg.gap_direction = std::move(g);
    }
    return cfg;
}

double evaluate_crossmodal(const RidgeDecoder& decoder, const ToyTask& task, Variant v) {
    const Matrix x_test = select_rows(task.pairs.x, task.test);
    const Matrix inputs = variant_collapses(v) ? c3_test_transform(x_test, task_means(task)) : x_test;
    return accuracy(decoder, inputs, select(task.labels, task.test));
}

VariantOutcome run_variant(const ToyTask& task, Variant v, double train_sigma, double lambda,
                           std::uint64_t noise_seed) {
    const std::size_t K = task.spec.classes;
    const C3Config cfg = variant_config(v, task, train_sigma, noise_seed);
    const auto train_labels = select(task.labels, task.train);
    const auto test_labels = select(task.labels, task.test);

    VariantOutcome out;
    const ModalityMeans means = task_means(task);
    const Matrix y_train = c3_train_transform(select_rows(task.pairs.y, task.train), means, cfg);
    out.cross = evaluate_crossmodal(train_classifier(y_train, train_labels, K, lambda), task, v);

    // Same transforms, but the decoder sees x on both sides.
    const Matrix x_train_raw = select_rows(task.pairs.x, task.train);
    const Matrix x_test_raw = select_rows(task.pairs.x, task.test);
    const ModalityMeans own{means.mean_x, row_mean(x_train_raw)};
    const Matrix x_train = c3_train_transform(x_train_raw, own, cfg);
    const Matrix x_test = cfg.collapse ? c3_test_transform(x_test_raw, own) : x_test_raw;
    out.in_modality = accuracy(train_classifier(x_train, train_labels, K, lambda), x_test, test_labels);
    return out;
}

std::vector<AblationRow> ablation(const ToyTaskSpec& spec, const AblationOptions& options) {
    require(options.seeds >= 1, "ablation needs at least one seed");
    require(!options.sigma_grid.empty(), "sigma grid is empty");
    std::vector<ToyTask> tasks;
    for (std::size_t s = 0; s < options.seeds; ++s) {
        ToyTaskSpec ts = spec;
        ts.seed = spec.seed + s;
        tasks.push_back(make_toy_task(ts));
    }

    std::vector<AblationRow> rows;
    for (Variant v : all_variants()) {
        AblationRow row;
        row.variant = v;
        row.seeds = options.seeds;
        const std::vector<double> grid = variant_corrupts(v) ? options.sigma_grid : std::vector<double>{0.0};
        double best = -1.0;
        for (double sigma : grid) {
            std::vector<double> cross, inmod;
            for (const ToyTask& t : tasks) {
                const VariantOutcome o = run_variant(t, v, sigma, options.lambda, derive_seed(t.spec.seed, 100));
                cross.push_back(o.cross);
                inmod.push_back(o.in_modality);
            }
            const MeanStd ms = mean_std(cross);
            row.sigma_means.push_back(ms.mean);
            if (ms.mean > best) {
                best = ms.mean;
                row.best_sigma = sigma;
                row.accuracy = ms;
                row.in_modality = mean_std(inmod);
                row.per_seed = cross;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ShiftPoint> gap_shift_sweep(const RidgeDecoder& decoder, const ToyTask& task,
                                        const std::vector<double>& shifts, ShiftDirection direction,
                                        std::uint64_t seed) {
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        require(shifts[i] >= 0.0, "shift norms must be non-negative");
        require(i == 0 || shifts[i] >= shifts[i - 1], "shift norms must be sorted");
    }
    const Matrix& basis = direction == ShiftDirection::orthogonal ? task.complement_basis : task.span_basis;
    require(basis.rows() >= 1, "no orthogonal direction: the span fills the whole space");
    Rng rng(seed, kShift);
    const Vector u = random_unit_in(basis, rng);

    const Matrix x_test = select_rows(task.pairs.x, task.test);
    const auto labels = select(task.labels, task.test);
    std::vector<ShiftPoint> curve;
    for (double c : shifts) {
        Matrix shifted = x_test;
        if (c != 0.0)
            for (std::size_t i = 0; i < shifted.rows(); ++i)
                for (std::size_t j = 0; j < shifted.cols(); ++j) shifted(i, j) += c * u[j];
        curve.push_back({c, accuracy(decoder, shifted, labels)});
    }
    return curve;
}

} // namespace mmgeo
