#include "alebo/kernels.hpp"

#include <cmath>

namespace alebo {

namespace {
const double kSqrt5 = std::sqrt(5.0);

void check_pair(const Vector& a, const Vector& b, Index dim) {
    if (a.size() != b.size() || a.size() != dim) throw DimensionError("kernel: dimension mismatch");
}

void check_lengthscales(const Vector& ls) {
    for (Index k = 0; k < ls.size(); ++k)
        if (!(ls(k) > 0.0)) throw std::invalid_argument("kernel: lengthscales must be positive");
}
}  // namespace

std::string_view to_string(KernelType k) {
    switch (k) {
        case KernelType::Mahalanobis: return "mahalanobis";
        case KernelType::ArdRbf: return "ard_rbf";
        case KernelType::ArdMatern52: return "ard_matern52";
    }
    return "unknown";
}

KernelType kernel_from_string(std::string_view name) {
    if (name == "mahalanobis") return KernelType::Mahalanobis;
    if (name == "ard_rbf" || name == "rbf") return KernelType::ArdRbf;
    if (name == "ard_matern52" || name == "matern52") return KernelType::ArdMatern52;
    throw ConfigError("unknown kernel: " + std::string(name));
}

double mahalanobis_kernel(const Vector& y, const Vector& y_prime, const Matrix& gamma, double signal_variance) {
    check_pair(y, y_prime, gamma.rows());
    if (gamma.cols() != gamma.rows()) throw DimensionError("mahalanobis_kernel: Γ must be square");
    const Vector diff = y - y_prime;
    return signal_variance * std::exp(-diff.dot(gamma * diff));
}

double ard_rbf_kernel(const Vector& z, const Vector& z_prime, const Vector& lengthscales, double signal_variance) {
    check_pair(z, z_prime, lengthscales.size());
    check_lengthscales(lengthscales);
    const double sq = (z - z_prime).cwiseQuotient(lengthscales).squaredNorm();
    return signal_variance * std::exp(-0.5 * sq);
}

double ard_matern52_kernel(const Vector& z, const Vector& z_prime, const Vector& lengthscales,
                           double signal_variance) {
    check_pair(z, z_prime, lengthscales.size());
    check_lengthscales(lengthscales);
    const double r = (z - z_prime).cwiseQuotient(lengthscales).norm();
    return signal_variance * (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * std::exp(-kSqrt5 * r);
}

Index metric_param_count(KernelType kernel, Index dim) {
    return kernel == KernelType::Mahalanobis ? dim * (dim + 1) / 2 : dim;
}

Vector pack_upper_factor(const Matrix& u) {
    const Index d = u.rows();
    Vector packed(d * (d + 1) / 2);
    Index k = 0;
    for (Index a = 0; a < d; ++a) {
        for (Index b = a; b < d; ++b) {
            if (a == b) {
                if (!(u(a, a) > 0.0)) throw std::invalid_argument("pack_upper_factor: diagonal must be positive");
                packed(k++) = std::log(u(a, a));
            } else {
                packed(k++) = u(a, b);
            }
        }
    }
    return packed;
}

Matrix unpack_upper_factor(const Vector& packed, Index dim) {
    if (packed.size() != dim * (dim + 1) / 2) throw DimensionError("unpack_upper_factor: wrong length");
    Matrix u = Matrix::Zero(dim, dim);
    Index k = 0;
    for (Index a = 0; a < dim; ++a)
        for (Index b = a; b < dim; ++b) u(a, b) = a == b ? std::exp(packed(k++)) : packed(k++);
    return u;
}

Vector LatentArdParams::inverse_lengthscale_diagonal() const {
    return (2.0 * lengthscales.array().square()).inverse().matrix();
}

Matrix LatentArdParams::implied_metric(const Matrix& up) const {
    if (true_projection.cols() != up.rows()) throw DimensionError("implied_metric: T and up-projection mismatch");
    const Matrix tb = true_projection * up;
    return tb.transpose() * inverse_lengthscale_diagonal().asDiagonal() * tb;
}

KernelTransform::KernelTransform(KernelType kernel, const Vector& metric_params, Index dim)
    : kernel_(kernel), dim_(dim), params_(metric_params) {
    if (metric_params.size() != metric_param_count(kernel, dim))
        throw DimensionError("KernelTransform: wrong number of metric parameters");
    if (kernel == KernelType::Mahalanobis) {
        transform_ = unpack_upper_factor(metric_params, dim);
    } else {
        transform_ = (-metric_params.array()).exp().matrix().asDiagonal();
    }
}

double KernelTransform::correlation(double sq_dist) const {
    switch (kernel_) {
        case KernelType::Mahalanobis: return std::exp(-sq_dist);
        case KernelType::ArdRbf: return std::exp(-0.5 * sq_dist);
        case KernelType::ArdMatern52: {
            const double r = std::sqrt(sq_dist);
            return (1.0 + kSqrt5 * r + 5.0 * sq_dist / 3.0) * std::exp(-kSqrt5 * r);
        }
    }
    return 0.0;
}

double KernelTransform::gradient_scale(double sq_dist, double& corr) const {
    switch (kernel_) {
        case KernelType::Mahalanobis:
            corr = std::exp(-sq_dist);
            return 2.0 * corr;
        case KernelType::ArdRbf:
            corr = std::exp(-0.5 * sq_dist);
            return corr;
        case KernelType::ArdMatern52: {
            const double r = std::sqrt(sq_dist);
            const double e = std::exp(-kSqrt5 * r);
            corr = (1.0 + kSqrt5 * r + 5.0 * sq_dist / 3.0) * e;
            return 5.0 / 3.0 * (1.0 + kSqrt5 * r) * e;
        }
    }
    corr = 0.0;
    return 0.0;
}

Vector KernelTransform::chain_metric_gradient(const Matrix& dl_dm) const {
    Vector g(params_.size());
    if (kernel_ == KernelType::Mahalanobis) {
        Index k = 0;
        for (Index a = 0; a < dim_; ++a)
            for (Index b = a; b < dim_; ++b) g(k++) = a == b ? dl_dm(a, a) * transform_(a, a) : dl_dm(a, b);
    } else {
        // M_kk = exp(-θ_k), so ∂M_kk/∂θ_k = -M_kk.
        for (Index k = 0; k < dim_; ++k) g(k) = -dl_dm(k, k) * transform_(k, k);
    }
    return g;
}

}  // namespace alebo
