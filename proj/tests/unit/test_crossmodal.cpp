#include "mmgeo/crossmodal.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace mmgeo;

namespace {

ToyTaskSpec small_spec(std::uint64_t seed) {
    ToyTaskSpec s;
    s.n = 2000;
    s.seed = seed;
    return s;
}

} // namespace

TEST(ToyTask, SplitIsDisjointAndComplete) {
    const ToyTask t = make_toy_task(small_spec(1));
    std::set<std::size_t> train(t.train.begin(), t.train.end()), test(t.test.begin(), t.test.end());
    EXPECT_EQ(train.size() + test.size(), 2000u);
    for (std::size_t i : t.test) EXPECT_EQ(train.count(i), 0u);
    for (std::size_t l : t.labels) EXPECT_LT(l, 10u);
}

TEST(ToyTask, GapOrthogonalToSpan) {
    const ToyTask t = make_toy_task(small_spec(2));
    EXPECT_NEAR(norm(t.true_gap), 0.83, 1e-12);
    for (std::size_t r = 0; r < t.span_basis.rows(); ++r) EXPECT_LE(std::abs(dot(t.span_basis.row(r), t.true_gap)), 1e-10);
}

TEST(ToyTask, NoGapNoNoiseMeansIdenticalModalities) {
    ToyTaskSpec s = small_spec(3);
    s.gap_norm = 0.0;
    s.sigma_align = 0.0;
    const ToyTask t = make_toy_task(s);
    EXPECT_EQ(t.pairs.x, t.pairs.y);
}

TEST(ToyTask, DeterministicAndValidated) {
    const ToyTask a = make_toy_task(small_spec(4)), b = make_toy_task(small_spec(4));
    EXPECT_EQ(a.pairs.x, b.pairs.x);
    EXPECT_EQ(a.labels, b.labels);
    ToyTaskSpec bad = small_spec(4);
    bad.classes = 40;
    EXPECT_THROW(make_toy_task(bad), std::invalid_argument);
    bad = small_spec(4);
    bad.span_dim = bad.d;
    EXPECT_THROW(make_toy_task(bad), std::invalid_argument);
}

TEST(ToyTask, ClassesSeparableWithinModality) {
    ToyTaskSpec s;
    s.seed = 5;
    const ToyTask t = make_toy_task(s);
    const Matrix xtr = select_rows(t.pairs.x, t.train), xte = select_rows(t.pairs.x, t.test);
    const RidgeDecoder dec = train_classifier(xtr, select(t.labels, t.train), 10, 0.1);
    EXPECT_GE(accuracy(dec, xte, select(t.labels, t.test)), 0.99);
}

TEST(Ridge, ExactLinearTargets) {
    const Matrix x = oracle::random_gaussian(60, 4, 6);
    Matrix t(60, 2);
    for (std::size_t i = 0; i < 60; ++i) {
        t(i, 0) = 2.0 * x(i, 0) - x(i, 3) + 0.5;
        t(i, 1) = -x(i, 1) + 3.0 * x(i, 2) - 1.0;
    }
    const RidgeDecoder dec = train_decoder(x, t, 1e-8);
    const Matrix p = dec.predict(x);
    double mse = 0.0;
    for (std::size_t i = 0; i < p.values().size(); ++i) mse += std::pow(p.values()[i] - t.values()[i], 2);
    EXPECT_LE(mse / static_cast<double>(p.values().size()), 1e-6);
}

TEST(Ridge, MatchesGradientDescentOracle) {
    const Matrix x = oracle::random_gaussian(40, 3, 7);
    const Matrix t = oracle::random_gaussian(40, 2, 8);
    const RidgeDecoder dec = train_decoder(x, t, 0.5);
    const Matrix w = oracle::gd_ridge(x, t, 0.5, 20000);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(dec.weights(c, k), w(c, k), 1e-4);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(dec.bias[k], w(3, k), 1e-4);
}

TEST(Ridge, RowPermutationInvariant) {
    const Matrix x = oracle::random_gaussian(30, 4, 9), t = oracle::random_gaussian(30, 3, 10);
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + 7, perm.end());
    const RidgeDecoder a = train_decoder(x, t, 0.1), b = train_decoder(select_rows(x, perm), select_rows(t, perm), 0.1);
    for (std::size_t i = 0; i < a.weights.values().size(); ++i) EXPECT_NEAR(a.weights.values()[i], b.weights.values()[i], 1e-12);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a.bias[k], b.bias[k], 1e-12);
}

TEST(Ridge, RejectsZeroLambda) {
    EXPECT_THROW(train_decoder(Matrix(4, 2, 1.0), Matrix(4, 1, 0.0), 0.0), std::invalid_argument);
}

TEST(Variants, NamesAndFlags) {
    EXPECT_EQ(variant_name(Variant::C1), "C1");
    EXPECT_EQ(variant_name(Variant::C21), "C2_1");
    EXPECT_EQ(variant_name(Variant::C22), "C2_2");
    EXPECT_EQ(variant_name(Variant::C22SpanOnly), "C2_2_span_only");
    EXPECT_EQ(variant_name(Variant::C3), "C3");
    EXPECT_TRUE(variant_collapses(Variant::C3) && variant_corrupts(Variant::C3));
    EXPECT_FALSE(variant_collapses(Variant::C22) || variant_corrupts(Variant::C21));
    EXPECT_EQ(all_variants().size(), 5u);
}

TEST(Variants, EqualWithoutGapOrNoise) {
    ToyTaskSpec s = small_spec(11);
    s.gap_norm = 0.0;
    s.sigma_align = 0.0;
    const ToyTask t = make_toy_task(s);
    std::vector<double> acc;
    for (Variant v : all_variants()) acc.push_back(run_variant(t, v, 0.01, 0.1, 12).cross);
    const auto [lo, hi] = std::minmax_element(acc.begin(), acc.end());
    EXPECT_LE(*hi - *lo, 0.01);
}

TEST(Variants, InModalityAtLeastCrossModal) {
    const ToyTask t = make_toy_task(small_spec(13));
    for (Variant v : all_variants()) {
        const VariantOutcome o = run_variant(t, v, 0.05, 0.1, 14);
        EXPECT_GE(o.in_modality, o.cross) << variant_name(v);
    }
}

TEST(Variants, SpanOnlyConfigCarriesUnitGapDirection) {
    const ToyTask t = make_toy_task(small_spec(15));
    const C3Config cfg = variant_config(Variant::C22SpanOnly, t, 0.05, 1);
    ASSERT_TRUE(cfg.gap_direction.has_value());
    EXPECT_NEAR(norm(*cfg.gap_direction), 1.0, 1e-12);
    EXPECT_EQ(cfg.mode, CorruptionMode::span_only);
    EXPECT_FALSE(cfg.collapse);
}

TEST(ShiftSweep, ZeroShiftEqualsCrossModalEvaluation) {
    ToyTaskSpec s = small_spec(16);
    s.gap_norm = 0.0;
    s.sigma_align = 0.0;
    const ToyTask t = make_toy_task(s);
    const RidgeDecoder dec = train_classifier(select_rows(t.pairs.y, t.train), select(t.labels, t.train), 10, 0.1);
    const std::vector<ShiftPoint> curve = gap_shift_sweep(dec, t, {0.0, 1.0}, ShiftDirection::orthogonal, 17);
    EXPECT_NEAR(curve[0].metric, evaluate_crossmodal(dec, t, Variant::C1), 1e-10);
    EXPECT_LE(curve[1].metric, curve[0].metric);
}

TEST(ShiftSweep, RejectsUnsortedOrNegative) {
    const ToyTask t = make_toy_task(small_spec(18));
    const RidgeDecoder dec = train_classifier(select_rows(t.pairs.y, t.train), select(t.labels, t.train), 10, 0.1);
    EXPECT_THROW(gap_shift_sweep(dec, t, {0.5, 0.2}, ShiftDirection::orthogonal, 1), std::invalid_argument);
    EXPECT_THROW(gap_shift_sweep(dec, t, {-0.1}, ShiftDirection::orthogonal, 1), std::invalid_argument);
}

TEST(Ablation, RowsCoverVariantsAndSeeds) {
    AblationOptions opt;
    opt.seeds = 2;
    opt.sigma_grid = {0.05, 0.1};
    const std::vector<AblationRow> rows = ablation(small_spec(19), opt);
    ASSERT_EQ(rows.size(), 5u);
    for (const AblationRow& r : rows) {
        EXPECT_EQ(r.seeds, 2u);
        EXPECT_EQ(r.per_seed.size(), 2u);
        if (variant_corrupts(r.variant)) EXPECT_EQ(r.sigma_means.size(), 2u);
        EXPECT_GE(r.accuracy.mean, 0.0);
        EXPECT_LE(r.accuracy.mean, 1.0);
    }
}
