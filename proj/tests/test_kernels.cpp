#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "alebo/embedding.hpp"
#include "alebo/kernels.hpp"
#include "support.hpp"

using namespace alebo;
using namespace alebo::testing;

namespace {

// d distinct axis rows or a dense random T, whichever the trial asks for.
Matrix random_true_projection(Index d, Index big_d, bool axis_aligned, Rng& rng) {
    if (!axis_aligned) return random_matrix(d, big_d, rng);
    Matrix t = Matrix::Zero(d, big_d);
    std::vector<Index> idx(static_cast<std::size_t>(big_d));
    for (Index i = 0; i < big_d; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (Index k = 0; k < d; ++k) t(k, idx[static_cast<std::size_t>(k)]) = 1.0;
    return t;
}

// Latent ARD RBF evaluated on the true subspace, written out term by term.
double composed_covariance(const Matrix& t, const Matrix& b_pinv, const Vector& ls, double s2, const Vector& y,
                           const Vector& y2) {
    const Vector x = b_pinv * y;
    const Vector x2 = b_pinv * y2;
    double q = 0.0;
    for (Index k = 0; k < t.rows(); ++k) {
        double zk = 0.0, zk2 = 0.0;
        for (Index i = 0; i < t.cols(); ++i) {
            zk += t(k, i) * x(i);
            zk2 += t(k, i) * x2(i);
        }
        q += (zk - zk2) * (zk - zk2) / (2.0 * ls(k) * ls(k));
    }
    return s2 * std::exp(-q);
}

}  // namespace

TEST(MahalanobisKernel, Examples) {
    Rng rng = make_rng(1);
    const Vector y = random_vector(4, rng);
    const Vector y2 = random_vector(4, rng);
    const Matrix a = random_matrix(4, 4, rng);
    const Matrix gamma = a.transpose() * a;
    EXPECT_DOUBLE_EQ(mahalanobis_kernel(y, y, gamma, 2.5), 2.5);
    const Matrix half = 0.5 * Matrix::Identity(4, 4);
    EXPECT_NEAR(mahalanobis_kernel(y, y2, half, 1.0), std::exp(-0.5 * (y - y2).squaredNorm()), 1e-15);
}

TEST(ArdKernels, Examples) {
    Vector z(2), z2(2);
    z << 0.0, 0.0;
    z2 << 1.0, 1.0;
    const Vector ones = Vector::Ones(2);
    EXPECT_DOUBLE_EQ(ard_rbf_kernel(z, z, ones, 3.0), 3.0);
    EXPECT_NEAR(ard_rbf_kernel(z, z2, ones, 1.0), std::exp(-1.0), 1e-15);
    // r = sqrt(2)
    const double r = std::sqrt(2.0);
    EXPECT_NEAR(ard_matern52_kernel(z, z2, ones, 1.0),
                (1.0 + std::sqrt(5.0) * r + 5.0 * r * r / 3.0) * std::exp(-std::sqrt(5.0) * r), 1e-15);
    Vector bad(2);
    bad << 1.0, 0.0;
    EXPECT_THROW(ard_rbf_kernel(z, z2, bad, 1.0), std::invalid_argument);
    EXPECT_THROW(ard_rbf_kernel(z, Vector::Zero(3), ones, 1.0), DimensionError);
}

TEST(ArdKernels, RbfIsDiagonalMahalanobis) {
    Rng rng = make_rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const Index d = uniform_int(1, 6, rng);
        const Vector ls = uniform_in(d, 0.1, 3.0, rng);
        const Vector z = random_vector(d, rng), z2 = random_vector(d, rng);
        const Matrix gamma = (2.0 * ls.array().square()).inverse().matrix().asDiagonal();
        EXPECT_LT(relative_error(ard_rbf_kernel(z, z2, ls, 1.7), mahalanobis_kernel(z, z2, gamma, 1.7)), 1e-14);
    }
}

TEST(MahalanobisKernel, LatentArdEquivalence) {
    Rng rng = make_rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index d = uniform_int(1, 4, rng);
        const Index d_e = uniform_int(d, 8, rng);
        const Index big_d = uniform_int(d_e, 40, rng);
        const Matrix b = random_matrix(d_e, big_d, rng);
        const Matrix b_pinv = b.transpose() * (b * b.transpose()).inverse();
        LatentArdParams latent;
        latent.lengthscales = uniform_in(d, 0.2, 3.0, rng);
        latent.true_projection = random_true_projection(d, big_d, trial % 2 == 0, rng);
        latent.signal_variance = uniform_in(1, 0.1, 5.0, rng)(0);
        const Matrix gamma = latent.implied_metric(pseudo_inverse(b));
        const Vector y = random_vector(d_e, rng, 0.5), y2 = random_vector(d_e, rng, 0.5);
        const double oracle =
            composed_covariance(latent.true_projection, b_pinv, latent.lengthscales, latent.signal_variance, y, y2);
        const double value = mahalanobis_kernel(y, y2, gamma, latent.signal_variance);
        worst = std::max(worst, std::abs(value - oracle) / std::max(oracle, 1e-300));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(MahalanobisKernel, ImpliedMetricIsPositiveSemidefinite) {
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        LatentArdParams latent;
        latent.lengthscales = uniform_in(2, 0.2, 2.0, rng);
        latent.true_projection = random_matrix(2, 10, rng);
        const Matrix gamma = latent.implied_metric(random_matrix(10, 5, rng));
        EXPECT_LT((gamma - gamma.transpose()).norm(), 1e-12);
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(gamma);
        EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()));
    }
}

TEST(MahalanobisKernel, TranslationInvariant) {
    Rng rng = make_rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index d_e = uniform_int(1, 8, rng);
        const Matrix a = random_matrix(d_e, d_e, rng, 0.5);
        const Matrix gamma = a.transpose() * a;
        const Vector y = random_vector(d_e, rng), y2 = random_vector(d_e, rng);
        const Vector shift = random_vector(d_e, rng, 3.0);
        const double k0 = mahalanobis_kernel(y, y2, gamma, 1.3);
        const double k1 = mahalanobis_kernel(y + shift, y2 + shift, gamma, 1.3);
        worst = std::max(worst, std::abs(k0 - k1));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(MahalanobisKernel, EmbeddedStationarityFollowsFromTrueStationarity) {
    // a translation δ in the embedding moves the latent inputs by T B† δ for both points
    Rng rng = make_rng(6);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index d = 2, d_e = 4, big_d = 20;
        const Matrix b = random_matrix(d_e, big_d, rng);
        const Matrix b_pinv = pseudo_inverse(b);
        const Matrix t = random_true_projection(d, big_d, true, rng);
        const Vector ls = uniform_in(d, 0.5, 2.0, rng);
        const Vector y = random_vector(d_e, rng, 0.3), y2 = random_vector(d_e, rng, 0.3);
        const Vector shift = random_vector(d_e, rng, 0.3);
        const double k0 = composed_covariance(t, b_pinv, ls, 1.0, y, y2);
        const double k1 = composed_covariance(t, b_pinv, ls, 1.0, y + shift, y2 + shift);
        worst = std::max(worst, std::abs(k0 - k1));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(UpperFactor, PackRoundTrip) {
    Rng rng = make_rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Index d = uniform_int(1, 6, rng);
        Matrix u = random_matrix(d, d, rng).triangularView<Eigen::Upper>();
        for (Index i = 0; i < d; ++i) u(i, i) = std::abs(u(i, i)) + 0.1;
        const Vector packed = pack_upper_factor(u);
        EXPECT_EQ(packed.size(), metric_param_count(KernelType::Mahalanobis, d));
        EXPECT_LT((unpack_upper_factor(packed, d) - u).norm(), 1e-12);
    }
    EXPECT_EQ(metric_param_count(KernelType::ArdRbf, 5), 5);
}

TEST(KernelTransform, MatchesDirectKernels) {
    Rng rng = make_rng(8);
    for (KernelType kind : {KernelType::Mahalanobis, KernelType::ArdRbf, KernelType::ArdMatern52}) {
        for (int trial = 0; trial < 50; ++trial) {
            const Index d = uniform_int(1, 5, rng);
            const Vector params = random_vector(metric_param_count(kind, d), rng, 0.5);
            const KernelTransform kt(kind, params, d);
            const Vector y = random_vector(d, rng), y2 = random_vector(d, rng);
            const Matrix m = kt.transform();
            const double r2 = (m * (y - y2)).squaredNorm();
            double direct = 0.0;
            if (kind == KernelType::Mahalanobis) {
                direct = mahalanobis_kernel(y, y2, m.transpose() * m, 1.0);
            } else {
                const Vector ls = params.array().exp().matrix();
                direct = kind == KernelType::ArdRbf ? ard_rbf_kernel(y, y2, ls, 1.0)
                                                    : ard_matern52_kernel(y, y2, ls, 1.0);
            }
            EXPECT_LT(relative_error(kt.correlation(r2), direct), 1e-13);
        }
    }
}

TEST(KernelNames, RoundTrip) {
    for (KernelType k : {KernelType::Mahalanobis, KernelType::ArdRbf, KernelType::ArdMatern52})
        EXPECT_EQ(kernel_from_string(to_string(k)), k);
    EXPECT_THROW(kernel_from_string("linear"), ConfigError);
}
