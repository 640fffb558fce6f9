#include "mmgeo/contrastive.hpp"
#include "mmgeo/trainer.hpp"
#include "mmgeo/verification.hpp"
#include "mmgeo/worlds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace mmgeo;

TEST(Trainer, ZeroLearningRateKeepsInit) {
    const ContrastiveBatch b = random_batch(10, 6, 0.07, 1);
    for (bool renorm : {true, false}) {
        TrainerConfig cfg;
        cfg.learning_rate = 0.0;
        cfg.steps = 5;
        cfg.renormalize_each_step = renorm;
        const TrainingResult r = train_contrastive(b.pairs, 0.07, cfg);
        EXPECT_EQ(r.final_pairs.x, b.pairs.x);
        EXPECT_EQ(r.final_pairs.y, b.pairs.y);
    }
}

TEST(Trainer, RecordsAtCadenceAndFinalStep) {
    const ContrastiveBatch b = random_batch(8, 5, 0.07, 2);
    TrainerConfig cfg;
    cfg.steps = 25;
    cfg.record_every = 10;
    const TrainingResult r = train_contrastive(b.pairs, 0.07, cfg);
    ASSERT_EQ(r.trajectory.size(), 4u);
    EXPECT_EQ(r.trajectory[0].step, 0u);
    EXPECT_EQ(r.trajectory[1].step, 10u);
    EXPECT_EQ(r.trajectory[2].step, 20u);
    EXPECT_EQ(r.trajectory[3].step, 25u);
    EXPECT_EQ(r.trajectory[0].per_dim_variance_x.size(), 5u);
}

TEST(Trainer, RenormalisationKeepsRowsOnSphere) {
    const ContrastiveBatch b = random_batch(8, 5, 0.07, 3);
    TrainerConfig cfg;
    cfg.steps = 50;
    cfg.learning_rate = 0.5;
    const TrainingResult r = train_contrastive(b.pairs, 0.07, cfg);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(norm(r.final_pairs.x.row(i)), 1.0, 1e-12);
        EXPECT_NEAR(norm(r.final_pairs.y.row(i)), 1.0, 1e-12);
    }
}

TEST(Trainer, LossDecreases) {
    const ContrastiveBatch b = random_batch(16, 8, 0.07, 4);
    TrainerConfig cfg;
    cfg.steps = 200;
    cfg.record_every = 20;
    const TrainingResult r = train_contrastive(b.pairs, 0.07, cfg);
    for (std::size_t i = 1; i < r.trajectory.size(); ++i)
        EXPECT_LT(r.trajectory[i].loss, r.trajectory[i - 1].loss);
}

TEST(Trainer, BitDeterministic) {
    const ContrastiveBatch b = random_batch(12, 7, 0.07, 5);
    TrainerConfig cfg;
    cfg.steps = 40;
    const TrainingResult a = train_contrastive(b.pairs, 0.07, cfg);
    const TrainingResult c = train_contrastive(b.pairs, 0.07, cfg);
    EXPECT_EQ(a.final_pairs.x, c.final_pairs.x);
    EXPECT_EQ(a.final_pairs.y, c.final_pairs.y);
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) EXPECT_EQ(a.trajectory[i].loss, c.trajectory[i].loss);
}

TEST(Trainer, DivergenceReportsStep) {
    const ContrastiveBatch b = random_batch(6, 4, 0.07, 6);
    TrainerConfig cfg;
    cfg.steps = 10;
    cfg.learning_rate = std::numeric_limits<double>::max();
    cfg.renormalize_each_step = false;
    try {
        train_contrastive(b.pairs, 0.07, cfg);
        FAIL() << "divergence not detected";
    } catch (const DivergenceError& e) {
        EXPECT_LE(e.step(), 10u);
    }
}

TEST(Trainer, RejectsInvalidConfig) {
    const ContrastiveBatch b = random_batch(4, 3, 0.07, 7);
    TrainerConfig cfg;
    cfg.steps = 0;
    EXPECT_THROW(train_contrastive(b.pairs, 0.07, cfg), std::invalid_argument);
    cfg.steps = 1;
    cfg.learning_rate = -0.1;
    EXPECT_THROW(train_contrastive(b.pairs, 0.07, cfg), std::invalid_argument);
}

namespace {

// Init-sim blocks without the row normalisation, scaled to roughly unit rows,
// so every coordinate outside a modality's block is exactly constant.
PairedEmbeddings column_constant_pairs(const InitSimWorld& w) {
    const double s = 1.0 / std::sqrt(static_cast<double>(w.raw_x.cols()));
    PairedEmbeddings p{w.raw_x, w.raw_y};
    for (std::size_t i = 0; i < p.x.rows(); ++i)
        for (std::size_t c = 0; c < p.x.cols(); ++c) {
            p.x(i, c) *= s;
            p.y(i, c) *= s;
        }
    return p;
}

} // namespace

// Compact-form descent never touches coordinates where both modalities are
// constant: the shared block keeps its exact initial values.
TEST(Trainer, CompactFormPreservesSharedConstantBlock) {
    const InitSimWorld w = make_init_sim_world(64, 96, 6, 40, 8);
    const PairedEmbeddings init = column_constant_pairs(w);
    TrainerConfig cfg;
    cfg.steps = 100;
    cfg.record_every = 25;
    cfg.renormalize_each_step = false;
    cfg.gradient_form = GradientForm::compact;
    cfg.watch = DimMask::range(w.shared_begin(), 96);
    const TrainingResult r = train_contrastive(init, 0.07, cfg);
    for (const TrajectoryPoint& p : r.trajectory) EXPECT_EQ(p.masked_grad_max, 0.0);
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t c = w.shared_begin(); c < 96; ++c) {
            EXPECT_EQ(r.final_pairs.x(i, c), init.x(i, c));
            EXPECT_EQ(r.final_pairs.y(i, c), init.y(i, c));
        }
    EXPECT_EQ(r.trajectory.front().gap_masked, r.trajectory.back().gap_masked);
    EXPECT_LT(r.trajectory.back().loss, r.trajectory.front().loss);
}

// At the column-constant start the exact gradient in the shared block is the
// marginal correction term; the compact form there is exactly zero.
TEST(Trainer, ExactFormReportsMaskedMagnitudes) {
    const InitSimWorld w = make_init_sim_world(64, 96, 6, 40, 9);
    TrainerConfig cfg;
    cfg.steps = 10;
    cfg.record_every = 5;
    cfg.renormalize_each_step = false;
    cfg.watch = DimMask::range(w.shared_begin(), 96);
    const TrainingResult r = train_contrastive(column_constant_pairs(w), 0.07, cfg);
    EXPECT_EQ(r.trajectory.front().masked_compact_max, 0.0);
    EXPECT_GT(r.trajectory.front().masked_grad_max, 0.0);
    // The exact step applies the correction unevenly across rows, so the
    // shared columns stop being constant and the compact form leaves zero.
    EXPECT_GT(r.trajectory.back().masked_compact_max, 0.0);
}

// Row normalisation divides the constants by per-row norms, so the unit-norm
// world has no exactly constant columns and the compact form is not zero there.
TEST(Trainer, NormalisedWorldHasNoConstantColumns) {
    const InitSimWorld w = make_init_sim_world(64, 96, 6, 40, 10);
    TrainerConfig cfg;
    cfg.steps = 1;
    cfg.renormalize_each_step = false;
    cfg.gradient_form = GradientForm::compact;
    cfg.watch = DimMask::range(w.shared_begin(), 96);
    const TrainingResult r = train_contrastive(w.pairs, 0.07, cfg);
    EXPECT_GT(r.trajectory.front().masked_compact_max, 0.0);
}
