#include "mmgeo/trainer.hpp"

#include <algorithm>
#include <cmath>

namespace mmgeo {

void TrainerConfig::validate() const {
    require(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning rate must be finite and non-negative");
    require(steps >= 1, "at least one step is required");
    require(record_every >= 1, "record cadence must be positive");
}

namespace {

double masked_max(const Matrix& g, const DimMask& mask) {
    double mx = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t c : mask.dims) mx = std::max(mx, std::abs(g(i, c)));
    return mx;
}

bool all_finite(const Matrix& m) {
    return std::all_of(m.values().begin(), m.values().end(), [](double v) { return std::isfinite(v); });
}

// One descent step; with projection, rows that moved are put back on the sphere.
void apply_step(Matrix& m, const Matrix& grad, const TrainerConfig& cfg) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = m.row(i);
        bool moved = false;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double next = row[c] - cfg.learning_rate * grad(i, c);
            moved = moved || next != row[c];
            row[c] = next;
        }
        if (!moved || !cfg.renormalize_each_step) continue;
        const double len = norm(row);
        if (!std::isfinite(len)) continue; // reported as divergence by the caller
        if (!(len > 0.0)) throw RowError("row collapsed to zero and cannot be projected back", i);
        for (double& v : row) v /= len;
    }
}

} // namespace

TrainingResult train_contrastive(const PairedEmbeddings& init, double tau, const TrainerConfig& cfg) {
    cfg.validate();
    ContrastiveBatch batch{init, tau};
    batch.unit_norm = cfg.renormalize_each_step;
    batch.validate();
    const DimMask watch = cfg.watch.empty() ? DimMask::all(init.dims()) : cfg.watch;
    const DimMask full = DimMask::all(init.dims());

    TrainingResult result;
    auto record = [&](std::size_t step, const GradientPair* applied) {
        TrajectoryPoint p;
        p.step = step;
        p.loss = contrastive_loss(batch);
        if (!std::isfinite(p.loss)) throw DivergenceError(step);
        p.gap_full = masked_gap_distance(batch.pairs, full);
        p.gap_masked = masked_gap_distance(batch.pairs, watch);
        const GradientPair current = applied ? GradientPair{} :
            (cfg.gradient_form == GradientForm::exact ? exact_gradients(batch) : compact_gradients(batch));
        const GradientPair& g = applied ? *applied : current;
        p.masked_grad_max = std::max(masked_max(g.grad_x, watch), masked_max(g.grad_y, watch));
        const GradientPair compact = compact_gradients(batch);
        p.masked_compact_max = std::max(masked_max(compact.grad_x, watch), masked_max(compact.grad_y, watch));
        if (batch.size() >= 2) {
            p.per_dim_variance_x = per_dim_variance(batch.pairs.x);
            p.per_dim_variance_y = per_dim_variance(batch.pairs.y);
        }
        result.trajectory.push_back(std::move(p));
    };

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const GradientPair g =
            cfg.gradient_form == GradientForm::exact ? exact_gradients(batch) : compact_gradients(batch);
        if (step % cfg.record_every == 0) record(step, &g);
        if (!all_finite(g.grad_x) || !all_finite(g.grad_y)) throw DivergenceError(step);

        apply_step(batch.pairs.x, g.grad_x, cfg);
        apply_step(batch.pairs.y, g.grad_y, cfg);
        if (!all_finite(batch.pairs.x) || !all_finite(batch.pairs.y)) throw DivergenceError(step + 1);
    }
    record(cfg.steps, nullptr);
    result.final_pairs = batch.pairs;
    return result;
}

} // namespace mmgeo
