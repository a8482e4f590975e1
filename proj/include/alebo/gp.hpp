#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alebo/common.hpp"
#include "alebo/kernels.hpp"

namespace alebo {

/// Hyperparameters of a GP with a constant mean, in the units of the data they were fit to.
struct GpParams {
    KernelType kernel = KernelType::Mahalanobis;
    Index dim = 0;
    Vector metric;  ///< packed metric parameters, see metric_param_count()
    double signal_variance = 1.0;
    double noise_variance = 1e-6;
    double constant_mean = 0.0;
};

/// Maps GpParams to the unconstrained vector θ = [metric..., log σ², log(noise - floor), mean]
/// that MAP fitting and the gradient oracles work on.
struct HyperCodec {
    KernelType kernel = KernelType::Mahalanobis;
    Index dim = 0;
    double noise_floor = 0.0;

    Index metric_size() const { return metric_param_count(kernel, dim); }
    Index size() const { return metric_size() + 3; }
    Index signal_index() const { return metric_size(); }
    Index noise_index() const { return metric_size() + 1; }
    Index mean_index() const { return metric_size() + 2; }

    Vector encode(const GpParams& p) const;
    GpParams decode(const Vector& theta) const;
};

/// -½ rᵀK⁻¹r - ½ log|K| - (n/2) log 2π with K = Gram + noise·I and r = targets - mean.
/// Throws NumericalError when K stays indefinite after the jitter ladder.
double log_marginal_likelihood(const Matrix& inputs, const Vector& targets, const GpParams& params);

/// Same quantity evaluated at θ, with its analytic gradient with respect to θ.
double log_marginal_likelihood(const Matrix& inputs, const Vector& targets, const Vector& theta,
                               const HyperCodec& codec, Vector* gradient);

/// Log density of the hyperparameter prior at θ (up to a constant), with gradient.
///
/// Mahalanobis: N(0,1) on each off-diagonal U entry and each log U_ii. ARD kernels: N(0,1) on
/// each log lengthscale. Both: N(0, 2²) on log σ² and log noise, flat on the mean.
double log_prior(const Vector& theta, const HyperCodec& codec, Vector* gradient);

/// Cholesky factor of k, escalating diagonal jitter 0 → 1e-10 → 1e-8 → 1e-6.
Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& k, double* jitter_used = nullptr);

struct GaussianPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

struct PredictionGradient {
    GaussianPrediction prediction;
    Vector d_mean;
    Vector d_variance;
};

struct FitOptions {
    int restarts = 8;
    std::uint64_t seed = 0;
    int max_iterations = 200;
    /// Lower bound on the noise variance, in standardized output units.
    double noise_floor = 1e-6;
    /// Optional extra starting point (θ of a previous fit) tried as restart 0.
    std::optional<Vector> warm_start;
};

/// One conditional GP posterior: a metric sample with its cached factorization.
struct GpComponent {
    Vector metric;
    Matrix transformed_inputs;  ///< training inputs mapped through the kernel transform
    Matrix transform;
    Eigen::LLT<Matrix> chol;
    Vector alpha;
    double jitter = 0.0;
};

/// A fitted GP. Inputs are divided by `input_scale` and targets standardized before fitting;
/// `params` and `theta` live in those normalized units while predictions are returned in the
/// caller's units. Immutable after construction; prediction is a const read.
struct GPFit {
    KernelType kernel = KernelType::Mahalanobis;
    Index dim = 0;
    double input_scale = 1.0;
    double output_shift = 0.0;
    double output_scale = 1.0;
    HyperCodec codec;
    Vector theta;
    GpParams params;
    double log_posterior = 0.0;
    Matrix inputs;   ///< normalized training inputs, n x d
    Vector targets;  ///< standardized training targets
    Matrix raw_inputs;
    Vector raw_targets;
    Vector laplace_variances;            ///< posterior variances of the metric parameters
    std::vector<GpComponent> components;  ///< MAP only, or one per Laplace sample

    Index num_samples() const { return static_cast<Index>(components.size()); }

    /// MAP Mahalanobis parameters in the caller's units (Γ scaled back by the input scale).
    MahalanobisParams mahalanobis_map() const;
    /// Γ of every mixture component in the caller's units.
    std::vector<Matrix> component_metrics() const;
};

/// MAP fit by multi-restart L-BFGS on log likelihood + log prior. Deterministic for a seed;
/// restart ties go to the lower restart index.
GPFit fit_map(const Matrix& inputs, const Vector& targets, KernelType kernel, const FitOptions& options = {});

/// Laplace approximation of the metric posterior with a finite-difference diagonal Hessian;
/// returns a copy of `fit` whose mixture holds m posterior samples. `variance_scale` multiplies
/// the posterior variances (0 collapses every sample onto the MAP).
GPFit with_laplace_samples(const GPFit& fit, int m, std::uint64_t seed, double variance_scale = 1.0);

/// The Γ matrices of m Laplace posterior samples.
std::vector<Matrix> laplace_posterior_samples(const GPFit& fit, int m, std::uint64_t seed);

/// Moment-matched posterior of the latent function: mean of component means and
/// mean of component variances plus the variance of component means.
GaussianPrediction predict(const GPFit& fit, const Vector& y);
PredictionGradient predict_with_gradient(const GPFit& fit, const Vector& y);

/// Conditional posterior for one metric sample, factorized on the fit's normalized data.
GpComponent build_component(const GPFit& fit, const Vector& metric);

/// Gram matrix σ²·R (no noise) of the kernel on the rows of `inputs`.
Matrix gram_matrix(const Matrix& inputs, const GpParams& params);

}  // namespace alebo
