#include "mmgeo/tensor.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mmgeo;

TEST(Normalize, ThreeFourFive) {
    const Matrix out = l2_normalize_rows(Matrix::from_rows({{3.0, 4.0}}));
    EXPECT_DOUBLE_EQ(out(0, 0), 0.6);
    EXPECT_DOUBLE_EQ(out(0, 1), 0.8);
}

TEST(Normalize, IdempotentOnUnitRows) {
    const Matrix once = l2_normalize_rows(oracle::random_gaussian(20, 7, 1));
    const Matrix twice = l2_normalize_rows(once);
    for (std::size_t i = 0; i < once.values().size(); ++i) EXPECT_NEAR(once.values()[i], twice.values()[i], 1e-12);
    for (std::size_t i = 0; i < once.rows(); ++i) EXPECT_NEAR(norm(once.row(i)), 1.0, 1e-12);
}

TEST(Normalize, ZeroRowNamesTheRow) {
    const Matrix m = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
    try {
        l2_normalize_rows(m);
        FAIL() << "zero row accepted";
    } catch (const RowError& e) {
        EXPECT_EQ(e.row(), 1u);
    }
}

TEST(Normalize, PreservesDirection) {
    const Matrix m = oracle::random_gaussian(10, 5, 2);
    const Matrix u = l2_normalize_rows(m);
    for (std::size_t i = 0; i < m.rows(); ++i) EXPECT_NEAR(cosine(m.row(i), u.row(i)), 1.0, 1e-14);
}

TEST(RowMean, SmallCases) {
    EXPECT_EQ(row_mean(Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}})), (Vector{0.5, 0.5}));
    EXPECT_EQ(row_mean(Matrix::from_rows({{2.5, -1.0, 3.0}})), (Vector{2.5, -1.0, 3.0}));
}

TEST(RowMean, GaussianRowsCentreNearZero) {
    const Vector mean = row_mean(oracle::random_gaussian(1000, 16, 3));
    for (double v : mean) EXPECT_LT(std::abs(v), 0.15);
}

TEST(RowMean, EmptyRejected) { EXPECT_THROW(row_mean(Matrix(0, 3)), std::invalid_argument); }

TEST(Covariance, ConstantRowsGiveZero) {
    const Matrix c = covariance(Matrix(5, 3, 1.25));
    for (double v : c.values()) EXPECT_EQ(v, 0.0);
}

TEST(Covariance, TwoOpposingRows) {
    const Matrix c = covariance(Matrix::from_rows({{1.0, 0.0}, {-1.0, 0.0}}));
    EXPECT_EQ(c, Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}));
}

TEST(Covariance, MatchesBruteForce) {
    const Matrix m = oracle::random_gaussian(50, 8, 4);
    const Matrix c = covariance(m), ref = oracle::covariance(m);
    for (std::size_t i = 0; i < c.values().size(); ++i) EXPECT_NEAR(c.values()[i], ref.values()[i], 1e-10);
}

TEST(Covariance, ExactlySymmetric) {
    const Matrix c = covariance(oracle::random_gaussian(40, 12, 5));
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ(c(i, j), c(j, i));
}

TEST(Covariance, ShiftInvariant) {
    Matrix m = oracle::random_gaussian(30, 6, 6);
    const Matrix before = covariance(m);
    const Vector mean = row_mean(m);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t c = 0; c < m.cols(); ++c) m(i, c) -= mean[c];
    const Matrix after = covariance(m);
    for (std::size_t i = 0; i < before.values().size(); ++i) EXPECT_NEAR(before.values()[i], after.values()[i], 1e-10);
}

TEST(Covariance, SingleRowRejected) { EXPECT_THROW(covariance(Matrix(1, 3)), std::invalid_argument); }

TEST(Cosine, BasicValues) {
    const Vector u{1.0, 1.0}, e0{1.0, 0.0}, e1{0.0, 1.0};
    EXPECT_DOUBLE_EQ(cosine(u, u), 1.0);
    EXPECT_DOUBLE_EQ(cosine(e0, e1), 0.0);
    EXPECT_NEAR(cosine(u, e0), std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(Cosine, ClampedAndRejectsZero) {
    const Vector u{1e-3, 3.0, -7.0};
    const double c = cosine(u, u);
    EXPECT_LE(c, 1.0);
    EXPECT_THROW(cosine(Vector{0.0, 0.0}, u), std::invalid_argument);
}

TEST(PairwiseCosine, IdenticalRows) {
    const MeanStd s = mean_pairwise_cosine(Matrix(6, 4, 0.5));
    EXPECT_NEAR(s.mean, 1.0, 1e-15);
    EXPECT_NEAR(s.std, 0.0, 1e-7);
}

TEST(PairwiseCosine, StandardBasis) {
    const MeanStd s = mean_pairwise_cosine(Matrix::identity(9));
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_EQ(s.std, 0.0);
}

TEST(PairwiseCosine, MatchesDirectEnumeration) {
    const Matrix m = oracle::random_gaussian(300, 20, 7);
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.rows(); ++j) {
            double d = 0.0, a = 0.0, b = 0.0;
            for (std::size_t c = 0; c < m.cols(); ++c) {
                d += m(i, c) * m(j, c);
                a += m(i, c) * m(i, c);
                b += m(j, c) * m(j, c);
            }
            const double v = d / std::sqrt(a * b);
            sum += v;
            sq += v * v;
            ++count;
        }
    const double mean = sum / static_cast<double>(count);
    const MeanStd s = mean_pairwise_cosine(m);
    EXPECT_NEAR(s.mean, mean, 1e-12);
    EXPECT_NEAR(s.std, std::sqrt(sq / static_cast<double>(count) - mean * mean), 1e-9);
}

TEST(PairwiseCosine, IsotropicCloudIsCentred) {
    const MeanStd s = mean_pairwise_cosine(oracle::random_gaussian(1000, 512, 8));
    EXPECT_LT(std::abs(s.mean), 0.05);
}

TEST(PairwiseCosine, ZeroRowRejected) {
    EXPECT_THROW(mean_pairwise_cosine(Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}})), std::invalid_argument);
}

TEST(Gemm, MatchesLoops) {
    const Matrix a = oracle::random_gaussian(7, 5, 9), b = oracle::random_gaussian(5, 4, 10);
    const Matrix c = matmul(a, b);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 5; ++k) s += a(i, k) * b(k, j);
            EXPECT_NEAR(c(i, j), s, 1e-13);
        }
    const Matrix nt = matmul_nt(a, b.transposed()), tn = matmul_tn(a.transposed(), b);
    for (std::size_t i = 0; i < c.values().size(); ++i) {
        EXPECT_NEAR(nt.values()[i], c.values()[i], 1e-13);
        EXPECT_NEAR(tn.values()[i], c.values()[i], 1e-13);
    }
    EXPECT_THROW(matmul(a, a), std::invalid_argument);
}

TEST(Cholesky, SolvesSpdSystem) {
    const Matrix g = oracle::random_gaussian(10, 4, 11);
    Matrix a = matmul_tn(g, g);
    for (std::size_t i = 0; i < 4; ++i) a(i, i) += 0.5;
    const Matrix b = oracle::random_gaussian(4, 2, 12);
    const Matrix x = cholesky_solve(a, b);
    const Matrix back = matmul(a, x);
    for (std::size_t i = 0; i < b.values().size(); ++i) EXPECT_NEAR(back.values()[i], b.values()[i], 1e-12);
}

TEST(EmbeddingMatrixContract, UnitNormAndFinite) {
    EmbeddingMatrix e{Matrix::from_rows({{0.6, 0.8}, {1.0, 0.0}}), true};
    EXPECT_NO_THROW(e.validate());
    e.values(1, 0) = 1.0 + 1e-8;
    EXPECT_THROW(e.validate(), RowError);
    e.unit_norm = false;
    EXPECT_NO_THROW(e.validate());
    e.values(0, 1) = std::nan("");
    try {
        e.validate();
        FAIL() << "NaN accepted";
    } catch (const RowError& err) {
        EXPECT_EQ(err.row(), 0u);
    }
}

TEST(MeanStdStats, Population) {
    const Vector v{1.0, 2.0, 3.0, 4.0};
    const MeanStd s = mean_std(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.std, std::sqrt(1.25));
}
