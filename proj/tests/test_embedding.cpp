#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "alebo/embedding.hpp"
#include "support.hpp"

using namespace alebo;
using namespace alebo::testing;

TEST(Embedding, HypersphereColumnsAreUnitNorm) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const EmbeddingSpec spec = generate_embedding(Strategy::Hypersphere, 100, 4, s);
        ASSERT_EQ(spec.down_matrix.rows(), 4);
        ASSERT_EQ(spec.down_matrix.cols(), 100);
        for (Index j = 0; j < 100; ++j) EXPECT_NEAR(spec.down_matrix.col(j).norm(), 1.0, 1e-12);
        EXPECT_TRUE(spec.uses_polytope());
    }
}

TEST(Embedding, HesboTiesEachCoordinateToOneSign) {
    const EmbeddingSpec spec = generate_embedding(Strategy::Hesbo, 100, 4, 3);
    ASSERT_EQ(spec.up_matrix.rows(), 100);
    for (Index i = 0; i < 100; ++i) {
        int nonzero = 0;
        for (Index j = 0; j < 4; ++j) {
            const double v = spec.up_matrix(i, j);
            if (v != 0.0) {
                ++nonzero;
                EXPECT_EQ(std::abs(v), 1.0);
            }
        }
        EXPECT_EQ(nonzero, 1);
    }
    EXPECT_FALSE(spec.uses_polytope());
}

TEST(Embedding, GaussianEntriesAreStandardNormal) {
    const EmbeddingSpec spec = generate_embedding(Strategy::Gaussian, 1000, 12, 7);
    const Matrix& b = spec.down_matrix;
    const double n = static_cast<double>(b.size());
    const double mean = b.mean();
    const double var = (b.array() - mean).square().sum() / (n - 1.0);
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
    EXPECT_NEAR(var, 1.0, 0.1);
}

TEST(Embedding, DeterministicForSeed) {
    for (Strategy s : {Strategy::Gaussian, Strategy::Hypersphere, Strategy::Hesbo, Strategy::Rembo}) {
        const EmbeddingSpec a = generate_embedding(s, 30, 5, 42);
        const EmbeddingSpec b = generate_embedding(s, 30, 5, 42);
        EXPECT_EQ(a.up_matrix, b.up_matrix);
        EXPECT_EQ(a.down_matrix, b.down_matrix);
    }
}

TEST(Embedding, RejectsBadDimensions) {
    EXPECT_THROW(generate_embedding(Strategy::Hypersphere, 4, 5, 0), DimensionError);
    EXPECT_THROW(generate_embedding(Strategy::Hesbo, 10, 0, 0), DimensionError);
    const EmbeddingSpec spec = generate_embedding(Strategy::Hesbo, 10, 2, 0);
    EXPECT_THROW(polytope_of(spec), UnsupportedStrategyError);
    EXPECT_THROW(up_project(spec, Vector::Zero(3)), DimensionError);
}

TEST(UpProject, Examples) {
    const EmbeddingSpec alebo = generate_embedding(Strategy::Hypersphere, 20, 3, 1);
    EXPECT_EQ(up_project(alebo, Vector::Zero(3)), Vector::Zero(20));

    EmbeddingSpec rembo = generate_embedding(Strategy::Rembo, 5, 2, 1);
    rembo.up_matrix.setZero();
    rembo.up_matrix(3, 0) = 2.7;
    Vector y(2);
    y << 1.0, 0.0;
    EXPECT_EQ(up_project(rembo, y)(3), 1.0);

    EmbeddingSpec hesbo = generate_embedding(Strategy::Hesbo, 8, 3, 1);
    hesbo.up_matrix.row(5).setZero();
    hesbo.up_matrix(5, 1) = -1.0;
    Vector z(3);
    z << 0.3, -0.7, 0.1;
    EXPECT_DOUBLE_EQ(up_project(hesbo, z)(5), 0.7);
}

TEST(ClipToBox, Examples) {
    Vector x(3);
    x << 2.0, -3.0, 0.5;
    Vector expected(3);
    expected << 1.0, -1.0, 0.5;
    EXPECT_EQ(clip_to_box(x), expected);
    EXPECT_EQ(clip_to_box(expected), expected);
}

TEST(ClipToBox, Idempotent) {
    Rng rng = make_rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector x = random_vector(uniform_int(1, 20, rng), rng, 2.0);
        const Vector once = clip_to_box(x);
        EXPECT_EQ(clip_to_box(once), once);
        EXPECT_LE(once.cwiseAbs().maxCoeff(), 1.0);
    }
}

TEST(Polytope, RowCountAndOrigin) {
    Matrix b(2, 3);
    b << 1.0, 0.0, 0.5, 0.0, 1.0, -0.5;
    const EmbeddingSpec spec = embedding_from_down_matrix(Strategy::Gaussian, b);
    const Polytope p = polytope_of(spec);
    EXPECT_EQ(p.rows(), 6);
    EXPECT_EQ(p.dim(), 2);
    EXPECT_TRUE(p.contains(Vector::Zero(2)));
}

TEST(Polytope, FeasiblePointsProjectInsideBox) {
    Rng rng = make_rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const int d_e = uniform_int(1, 5, rng);
        const int big_d = uniform_int(d_e, 40, rng);
        const EmbeddingSpec spec = generate_embedding(Strategy::Hypersphere, big_d, d_e, 100 + trial);
        const Matrix y = rejection_sample_feasible(polytope_of(spec), 20, trial);
        for (Index i = 0; i < y.rows(); ++i) {
            const Vector x = spec.up_matrix * y.row(i).transpose();
            EXPECT_LE(x.cwiseAbs().maxCoeff(), 1.0 + 1e-9);
            EXPECT_EQ(up_project(spec, y.row(i).transpose()), x);
        }
    }
}

TEST(EmbeddingBounds, IdentityGivesUnitBox) {
    const EmbeddingSpec spec = embedding_from_down_matrix(Strategy::Gaussian, Matrix::Identity(3, 3));
    const Box box = embedding_bounds(polytope_of(spec));
    for (Index i = 0; i < 3; ++i) {
        EXPECT_NEAR(box.lower(i), -1.0, 1e-12);
        EXPECT_NEAR(box.upper(i), 1.0, 1e-12);
    }
}

TEST(EmbeddingBounds, ContainsOriginAndSamples) {
    Rng rng = make_rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const int d_e = uniform_int(2, 6, rng);
        const EmbeddingSpec spec = generate_embedding(Strategy::Gaussian, 50, d_e, 7 + trial);
        const Polytope p = polytope_of(spec);
        const Box box = embedding_bounds(p);
        EXPECT_TRUE(box.contains(Vector::Zero(d_e)));
        const Matrix y = rejection_sample_feasible(p, 50, trial);
        for (Index i = 0; i < y.rows(); ++i) EXPECT_TRUE(box.contains(y.row(i).transpose()));
        // each bound is attained: pushing past it leaves the polytope
        for (Index k = 0; k < d_e; ++k) {
            Vector e = Vector::Zero(d_e);
            e(k) = box.upper(k) * (1.0 + 1e-6) + 1e-9;
            EXPECT_FALSE(p.contains(e, 0.0));
        }
    }
}

TEST(RejectionSampling, CountsAndDeterminism) {
    const EmbeddingSpec spec = generate_embedding(Strategy::Hypersphere, 60, 4, 2);
    const Polytope p = polytope_of(spec);
    const Matrix a = rejection_sample_feasible(p, 10, 77);
    const Matrix b = rejection_sample_feasible(p, 10, 77);
    EXPECT_EQ(a.rows(), 10);
    EXPECT_EQ(a, b);
    for (Index i = 0; i < a.rows(); ++i)
        EXPECT_LE((spec.up_matrix * a.row(i).transpose()).cwiseAbs().maxCoeff(), 1.0 + 1e-9);
}

TEST(RejectionSampling, UniformOnSquare) {
    const EmbeddingSpec spec = embedding_from_down_matrix(Strategy::Gaussian, Matrix::Identity(2, 2));
    const int n = 4000, bins = 4;
    const Matrix y = rejection_sample_feasible(polytope_of(spec), n, 5);
    std::vector<int> counts(bins * bins, 0);
    for (Index i = 0; i < n; ++i) {
        const int a = std::min(bins - 1, static_cast<int>((y(i, 0) + 1.0) / 2.0 * bins));
        const int b = std::min(bins - 1, static_cast<int>((y(i, 1) + 1.0) / 2.0 * bins));
        ++counts[static_cast<std::size_t>(a * bins + b)];
    }
    const double expected = static_cast<double>(n) / (bins * bins);
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 15 degrees of freedom, alpha = 0.001
    EXPECT_LT(chi2, 37.7);
}

TEST(RejectionSampling, EmptyPolytopeThrows) {
    Polytope p;
    p.a = Matrix(2, 1);
    p.a << 1.0, -1.0;
    p.b = Vector(2);
    p.b << -1.0, -1.0;
    EXPECT_THROW(rejection_sample_feasible(p, 1, 0), NumericalError);
}

TEST(PseudoInverse, MoorePenroseConditions) {
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const Index r = uniform_int(1, 5, rng);
        const Index c = uniform_int(r, 12, rng);
        const Matrix m = random_matrix(r, c, rng);
        const Matrix p = pseudo_inverse(m);
        EXPECT_LT((m * p * m - m).norm(), 1e-10);
        EXPECT_LT((p * m * p - p).norm(), 1e-10);
        EXPECT_LT((m * p - (m * p).transpose()).norm(), 1e-10);
        EXPECT_LT((p * m - (p * m).transpose()).norm(), 1e-10);
    }
}

TEST(HaarSubspace, RowsOrthonormal) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Matrix t = sample_haar_subspace(30, 3 + static_cast<int>(s % 5), s);
        EXPECT_LT((t * t.transpose() - Matrix::Identity(t.rows(), t.rows())).norm(), 1e-10);
    }
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_NEAR(sample_haar_subspace(2, 2, s).determinant(), 1.0, 1e-12);
}

TEST(HaarSubspace, ColumnNormMatchesReference) {
    // |T e_1|^2 for a Haar d-frame in R^D has the law of the squared norm of the first d
    // coordinates of a uniform unit vector; compare the two samples by Kolmogorov-Smirnov.
    const int big_d = 10, d = 3, n = 1500;
    std::vector<double> haar, reference;
    Rng rng = make_rng(99);
    for (int i = 0; i < n; ++i) {
        haar.push_back(sample_haar_subspace(big_d, d, 1000 + i).col(0).squaredNorm());
        const Vector g = random_vector(big_d, rng);
        reference.push_back(g.head(d).squaredNorm() / g.squaredNorm());
    }
    std::sort(haar.begin(), haar.end());
    std::sort(reference.begin(), reference.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < haar.size() && j < reference.size()) {
        if (haar[i] <= reference[j]) ++i;
        else ++j;
        ks = std::max(ks, std::abs(static_cast<double>(i) - static_cast<double>(j)) / n);
    }
    // two-sample critical value at alpha = 0.001
    EXPECT_LT(ks, 1.95 * std::sqrt(2.0 / n));
}
