#pragma once

#include <string_view>

#include "alebo/common.hpp"

namespace alebo {

enum class KernelType { Mahalanobis, ArdRbf, ArdMatern52 };

std::string_view to_string(KernelType k);
KernelType kernel_from_string(std::string_view name);

/// σ² exp(-(y - y')ᵀ Γ (y - y')).
double mahalanobis_kernel(const Vector& y, const Vector& y_prime, const Matrix& gamma, double signal_variance);

/// σ² exp(-Σ_k (z_k - z'_k)² / (2 ℓ_k²)). Throws on nonpositive lengthscales.
double ard_rbf_kernel(const Vector& z, const Vector& z_prime, const Vector& lengthscales, double signal_variance);

/// σ² (1 + √5 r + 5r²/3) exp(-√5 r) with r² = Σ_k (z_k - z'_k)² / ℓ_k².
double ard_matern52_kernel(const Vector& z, const Vector& z_prime, const Vector& lengthscales,
                           double signal_variance);

/// Free metric parameters: d(d+1)/2 for the Mahalanobis factor, d lengthscales for ARD kernels.
Index metric_param_count(KernelType kernel, Index dim);

/// Row-major upper triangle of U with the diagonal stored as log U_ii.
Vector pack_upper_factor(const Matrix& u);
Matrix unpack_upper_factor(const Vector& packed, Index dim);

/// Mahalanobis kernel hyperparameters, Γ = UᵀU.
struct MahalanobisParams {
    Matrix u_factor;
    double signal_variance = 1.0;
    double noise_variance = 0.0;
    double constant_mean = 0.0;

    Matrix metric() const { return u_factor.transpose() * u_factor; }
};

/// ARD RBF hyperparameters of a function living on a true subspace z = T x.
struct LatentArdParams {
    Vector lengthscales;
    Matrix true_projection;  ///< d x D
    double signal_variance = 1.0;

    /// Inverse-lengthscale diagonal diag(1 / (2 ℓ_k²)).
    Vector inverse_lengthscale_diagonal() const;
    /// Metric induced on an embedding with up-projection `up` (D x d_e): (T·up)ᵀ D (T·up).
    Matrix implied_metric(const Matrix& up) const;
};

/// Stationary kernel written as a function of a linear input transform z = M x.
///
/// Mahalanobis uses M = U and exp(-|Δz|²); ARD kernels use M = diag(1/ℓ) with exp(-|Δz|²/2)
/// or the Matérn-5/2 profile. Every kernel derivative then takes the form
/// ∂k/∂x = -g · Mᵀ Δz for a scalar g, which the GP code relies on.
class KernelTransform {
public:
    KernelTransform(KernelType kernel, const Vector& metric_params, Index dim);

    KernelType kernel() const { return kernel_; }
    Index dim() const { return dim_; }
    const Matrix& transform() const { return transform_; }

    /// Rows of x mapped through the transform.
    Matrix apply(const Matrix& x) const { return x * transform_.transpose(); }

    /// Unit-variance correlation at squared transformed distance r².
    double correlation(double sq_dist) const;
    /// Scalar g with ∂k/∂x = -σ² g Mᵀ Δz; also returns the correlation through `corr`.
    double gradient_scale(double sq_dist, double& corr) const;

    /// Converts ∂L/∂M into the gradient with respect to the packed metric parameters.
    Vector chain_metric_gradient(const Matrix& dl_dm) const;

private:
    KernelType kernel_;
    Index dim_;
    Vector params_;
    Matrix transform_;
};

}  // namespace alebo
