#include "alebo/model_fit.hpp"

#include <cmath>

#include "alebo/benchmarks.hpp"
#include "alebo/embedding.hpp"
#include "alebo/gp.hpp"

namespace alebo {

namespace {

double sample_sd(const Vector& v) {
    if (v.size() < 2) return 0.0;
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

ModelPredictions predict_all(const std::string& name, const GPFit& fit, const Matrix& points) {
    ModelPredictions p;
    p.model = name;
    p.mean.resize(points.rows());
    p.variance.resize(points.rows());
    for (Index i = 0; i < points.rows(); ++i) {
        const GaussianPrediction g = predict(fit, points.row(i).transpose());
        p.mean(i) = g.mean;
        p.variance(i) = g.variance;
    }
    p.noise_variance = fit.params.noise_variance * fit.output_scale * fit.output_scale;
    return p;
}

}  // namespace

ModelFitResult run_model_fit(const ModelFitConfig& config) {
    if (config.n_train < 2 || config.n_test < 1) throw ConfigError("modelfit: need n_train >= 2 and n_test >= 1");
    const AmbientProblem problem = make_problem(config.problem_id, config.problem_seed);
    const EmbeddingSpec spec = generate_embedding(Strategy::Hypersphere, problem.ambient_dim(), config.embed_dim,
                                                  derive_seed(config.seed, 20));
    const Matrix points = rejection_sample_feasible(polytope_of(spec), config.n_train + config.n_test,
                                                    derive_seed(config.seed, 21));
    Vector values(points.rows());
    for (Index i = 0; i < points.rows(); ++i)
        values(i) = problem.objective(up_project(spec, points.row(i).transpose()));

    const Matrix train_x = points.topRows(config.n_train);
    const Vector train_y = values.head(config.n_train);
    ModelFitResult result;
    result.n_train = config.n_train;
    result.test_points = points.bottomRows(config.n_test);
    result.test_targets = values.tail(config.n_test);

    FitOptions options;
    options.restarts = config.fit_restarts;
    options.seed = derive_seed(config.seed, 22);
    const GPFit mahalanobis = fit_map(train_x, train_y, KernelType::Mahalanobis, options);
    const GPFit sampled = with_laplace_samples(mahalanobis, config.laplace_samples, derive_seed(config.seed, 23));
    const GPFit ard = fit_map(train_x, train_y, KernelType::ArdRbf, options);

    result.models.push_back(predict_all("mahalanobis_sampled", sampled, result.test_points));
    result.models.push_back(predict_all("mahalanobis_point", mahalanobis, result.test_points));
    result.models.push_back(predict_all("ard_rbf", ard, result.test_points));
    return result;
}

FitMetrics score_predictions(const Vector& targets, const ModelPredictions& p) {
    if (targets.size() != p.mean.size() || targets.size() != p.variance.size())
        throw DimensionError("score_predictions: length mismatch");
    constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
    FitMetrics m;
    const double mean = targets.mean();
    const double ss_tot = (targets.array() - mean).square().sum();
    const double ss_res = (targets - p.mean).squaredNorm();
    m.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    double lpd = 0.0;
    for (Index i = 0; i < targets.size(); ++i) {
        const double v = std::max(p.variance(i) + p.noise_variance, 1e-300);
        const double r = targets(i) - p.mean(i);
        lpd += -0.5 * (kLogTwoPi + std::log(v) + r * r / v);
    }
    m.mean_log_density = lpd / static_cast<double>(targets.size());
    m.mean_variance = p.variance.mean();
    m.prediction_sd = sample_sd(p.mean);
    m.target_sd = sample_sd(targets);
    return m;
}

}  // namespace alebo
