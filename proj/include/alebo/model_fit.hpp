#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alebo/common.hpp"

namespace alebo {

/// Compares surrogate fits on one random hypersphere embedding: train and test points are
/// rejection-sampled from the embedding polytope so no evaluation is clipped.
struct ModelFitConfig {
    std::string problem_id = "hartmann6_d100";
    int embed_dim = 6;
    int n_train = 100;
    int n_test = 50;
    std::uint64_t seed = 0;
    std::uint64_t problem_seed = 0;
    int laplace_samples = 16;
    int fit_restarts = 8;
};

struct ModelPredictions {
    std::string model;  ///< "mahalanobis_sampled", "mahalanobis_point" or "ard_rbf"
    Vector mean;
    Vector variance;  ///< latent function variance
    double noise_variance = 0.0;
};

struct ModelFitResult {
    int n_train = 0;
    Matrix test_points;  ///< embedded test points as rows
    Vector test_targets;
    std::vector<ModelPredictions> models;
};

ModelFitResult run_model_fit(const ModelFitConfig& config);

struct FitMetrics {
    double r_squared = 0.0;
    /// Mean Gaussian log density of the targets under mean and variance + noise.
    double mean_log_density = 0.0;
    double mean_variance = 0.0;
    double prediction_sd = 0.0;
    double target_sd = 0.0;
};

FitMetrics score_predictions(const Vector& targets, const ModelPredictions& predictions);

}  // namespace alebo
