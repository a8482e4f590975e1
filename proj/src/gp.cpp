#include "alebo/gp.hpp"

#include <cmath>
#include <limits>

#include <ceres/ceres.h>

namespace alebo {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
constexpr double kScalePriorVariance = 4.0;
// Gamma(3, 6) on ARD lengthscales, in the caller's input units
constexpr double kLengthscaleShape = 3.0;
constexpr double kLengthscaleRate = 6.0;
constexpr double kLengthscaleMode = (kLengthscaleShape - 1.0) / kLengthscaleRate;

/// Gram σ²·R and the per-pair gradient scale σ²·g on transformed inputs z.
void gram_and_scales(const KernelTransform& kt, const Matrix& z, double signal_variance, Matrix& gram,
                     Matrix* scales) {
    const Index n = z.rows();
    gram.resize(n, n);
    if (scales) scales->resize(n, n);
    for (Index i = 0; i < n; ++i) {
        gram(i, i) = signal_variance;
        if (scales) (*scales)(i, i) = 0.0;
        for (Index j = 0; j < i; ++j) {
            const double sq = (z.row(i) - z.row(j)).squaredNorm();
            double corr = 0.0;
            const double g = kt.gradient_scale(sq, corr);
            gram(i, j) = gram(j, i) = signal_variance * corr;
            if (scales) (*scales)(i, j) = (*scales)(j, i) = signal_variance * g;
        }
    }
}

}  // namespace

GpComponent build_component(const GPFit& fit, const Vector& metric) {
    if (metric.size() != fit.codec.metric_size()) throw DimensionError("build_component: metric size");
    GpComponent c;
    c.metric = metric;
    const KernelTransform kt(fit.kernel, metric, fit.dim);
    c.transform = kt.transform();
    c.transformed_inputs = kt.apply(fit.inputs);
    Matrix k;
    gram_and_scales(kt, c.transformed_inputs, fit.params.signal_variance, k, nullptr);
    k.diagonal().array() += fit.params.noise_variance;
    c.chol = cholesky_with_jitter(k, &c.jitter);
    c.alpha = c.chol.solve((fit.targets.array() - fit.params.constant_mean).matrix());
    return c;
}

namespace {

double log_posterior(const GPFit& fit, const Vector& theta, Vector* gradient) {
    Vector g_prior;
    const double lml = log_marginal_likelihood(fit.inputs, fit.targets, theta, fit.codec, gradient);
    const double lp = log_prior(theta, fit.codec, gradient ? &g_prior : nullptr);
    if (gradient) *gradient += g_prior;
    return lml + lp;
}

class NegativeLogPosterior final : public ceres::FirstOrderFunction {
public:
    explicit NegativeLogPosterior(const GPFit& fit) : fit_(fit) {}

    bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
        const Vector theta = Eigen::Map<const Vector>(parameters, fit_.codec.size());
        if (!theta.allFinite()) return false;
        try {
            Vector g;
            const double value = log_posterior(fit_, theta, gradient ? &g : nullptr);
            if (!std::isfinite(value)) return false;
            *cost = -value;
            if (gradient) {
                if (!g.allFinite()) return false;
                Eigen::Map<Vector>(gradient, fit_.codec.size()) = -g;
            }
            return true;
        } catch (const NumericalError&) {
            return false;
        }
    }

    int NumParameters() const override { return static_cast<int>(fit_.codec.size()); }

private:
    const GPFit& fit_;
};

Vector random_start(const HyperCodec& codec, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector theta = Vector::Zero(codec.size());
    const Index d = codec.dim;
    if (codec.kernel == KernelType::Mahalanobis) {
        // U = I/√d perturbed at 0.1 scale.
        Index k = 0;
        const double log_diag = -0.5 * std::log(static_cast<double>(d));
        for (Index a = 0; a < d; ++a)
            for (Index b = a; b < d; ++b) theta(k++) = (a == b ? log_diag : 0.0) + 0.1 * normal(rng);
    } else {
        for (Index k = 0; k < d; ++k) theta(k) = std::log(kLengthscaleMode) + 0.1 * normal(rng);
    }
    theta(codec.signal_index()) = 0.1 * normal(rng);
    theta(codec.noise_index()) = std::log(1e-2) + 0.1 * normal(rng);
    theta(codec.mean_index()) = 0.0;
    return theta;
}

}  // namespace

Vector HyperCodec::encode(const GpParams& p) const {
    if (p.metric.size() != metric_size()) throw DimensionError("HyperCodec::encode: metric size");
    Vector theta(size());
    theta.head(metric_size()) = p.metric;
    theta(signal_index()) = std::log(p.signal_variance);
    theta(noise_index()) = std::log(std::max(p.noise_variance - noise_floor, 1e-300));
    theta(mean_index()) = p.constant_mean;
    return theta;
}

GpParams HyperCodec::decode(const Vector& theta) const {
    if (theta.size() != size()) throw DimensionError("HyperCodec::decode: wrong length");
    GpParams p;
    p.kernel = kernel;
    p.dim = dim;
    p.metric = theta.head(metric_size());
    p.signal_variance = std::exp(theta(signal_index()));
    p.noise_variance = noise_floor + std::exp(theta(noise_index()));
    p.constant_mean = theta(mean_index());
    return p;
}

Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& k, double* jitter_used) {
    static constexpr double kLadder[] = {0.0, 1e-10, 1e-8, 1e-6};
    for (const double jitter : kLadder) {
        Matrix kj = k;
        kj.diagonal().array() += jitter;
        Eigen::LLT<Matrix> llt(kj);
        if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite() &&
            (llt.matrixLLT().diagonal().array() > 0.0).all()) {
            if (jitter_used) *jitter_used = jitter;
            return llt;
        }
    }
    throw NumericalError("Cholesky factorization failed after jitter 1e-6");
}

double log_marginal_likelihood(const Matrix& inputs, const Vector& targets, const GpParams& params) {
    if (!(params.noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
    const KernelTransform kt(params.kernel, params.metric, params.dim);
    if (inputs.cols() != params.dim || inputs.rows() != targets.size())
        throw DimensionError("log_marginal_likelihood: shape mismatch");
    Matrix k;
    gram_and_scales(kt, kt.apply(inputs), params.signal_variance, k, nullptr);
    k.diagonal().array() += params.noise_variance;
    const auto llt = cholesky_with_jitter(k);
    const Vector r = (targets.array() - params.constant_mean).matrix();
    const Vector alpha = llt.solve(r);
    const double n = static_cast<double>(targets.size());
    return -0.5 * r.dot(alpha) - llt.matrixLLT().diagonal().array().log().sum() - 0.5 * n * kLogTwoPi;
}

double log_marginal_likelihood(const Matrix& inputs, const Vector& targets, const Vector& theta,
                               const HyperCodec& codec, Vector* gradient) {
    if (inputs.cols() != codec.dim || inputs.rows() != targets.size())
        throw DimensionError("log_marginal_likelihood: shape mismatch");
    if (targets.size() < 1) throw DimensionError("log_marginal_likelihood: need at least one observation");
    const GpParams p = codec.decode(theta);
    const KernelTransform kt(p.kernel, p.metric, p.dim);
    const Matrix z = kt.apply(inputs);
    const Index n = inputs.rows();

    Matrix ks;
    Matrix scales;
    gram_and_scales(kt, z, p.signal_variance, ks, gradient ? &scales : nullptr);
    Matrix k = ks;
    k.diagonal().array() += p.noise_variance;
    const auto llt = cholesky_with_jitter(k);
    const Vector r = (targets.array() - p.constant_mean).matrix();
    const Vector alpha = llt.solve(r);
    const double value = -0.5 * r.dot(alpha) - llt.matrixLLT().diagonal().array().log().sum() -
                         0.5 * static_cast<double>(n) * kLogTwoPi;

    if (gradient) {
        // ∂L/∂θ = ½ tr((ααᵀ - K⁻¹) ∂K/∂θ)
        const Matrix w = alpha * alpha.transpose() - llt.solve(Matrix::Identity(n, n));
        const Matrix c = w.cwiseProduct(scales);
        const Vector row_sums = c.rowwise().sum();
        const Matrix dl_dm = -(z.transpose() * row_sums.asDiagonal() * inputs - z.transpose() * c * inputs);
        gradient->resize(codec.size());
        gradient->head(codec.metric_size()) = kt.chain_metric_gradient(dl_dm);
        (*gradient)(codec.signal_index()) = 0.5 * w.cwiseProduct(ks).sum();
        (*gradient)(codec.noise_index()) = 0.5 * (p.noise_variance - codec.noise_floor) * w.trace();
        (*gradient)(codec.mean_index()) = alpha.sum();
    }
    return value;
}

double log_prior(const Vector& theta, const HyperCodec& codec, Vector* gradient) {
    if (theta.size() != codec.size()) throw DimensionError("log_prior: wrong length");
    const Index p = codec.metric_size();
    const bool ard = codec.kernel != KernelType::Mahalanobis;
    double value = 0.0;
    if (ard) {
        // density of log ℓ: shape·θ - rate·e^θ
        for (Index k = 0; k < p; ++k) value += kLengthscaleShape * theta(k) - kLengthscaleRate * std::exp(theta(k));
    } else {
        value = -0.5 * theta.head(p).squaredNorm();
    }
    const double ls = theta(codec.signal_index());
    const double ln = theta(codec.noise_index());
    value -= 0.5 * (ls * ls + ln * ln) / kScalePriorVariance;
    if (gradient) {
        gradient->setZero(codec.size());
        if (ard) {
            for (Index k = 0; k < p; ++k) (*gradient)(k) = kLengthscaleShape - kLengthscaleRate * std::exp(theta(k));
        } else {
            gradient->head(p) = -theta.head(p);
        }
        (*gradient)(codec.signal_index()) = -ls / kScalePriorVariance;
        (*gradient)(codec.noise_index()) = -ln / kScalePriorVariance;
    }
    return value;
}

Matrix gram_matrix(const Matrix& inputs, const GpParams& params) {
    const KernelTransform kt(params.kernel, params.metric, params.dim);
    Matrix k;
    gram_and_scales(kt, kt.apply(inputs), params.signal_variance, k, nullptr);
    return k;
}

MahalanobisParams GPFit::mahalanobis_map() const {
    if (kernel != KernelType::Mahalanobis) throw std::logic_error("mahalanobis_map: fit does not use the Mahalanobis kernel");
    MahalanobisParams m;
    m.u_factor = unpack_upper_factor(params.metric, dim) / input_scale;
    m.signal_variance = params.signal_variance * output_scale * output_scale;
    m.noise_variance = params.noise_variance * output_scale * output_scale;
    m.constant_mean = output_shift + output_scale * params.constant_mean;
    return m;
}

std::vector<Matrix> GPFit::component_metrics() const {
    std::vector<Matrix> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c.transform.transpose() * c.transform / (input_scale * input_scale));
    return out;
}

GPFit fit_map(const Matrix& inputs, const Vector& targets, KernelType kernel, const FitOptions& options) {
    if (inputs.rows() != targets.size()) throw DimensionError("fit_map: inputs and targets disagree");
    if (inputs.rows() < 1 || inputs.cols() < 1) throw DimensionError("fit_map: empty training set");
    if (!inputs.allFinite() || !targets.allFinite()) throw FitError("fit_map: non-finite training data");

    GPFit fit;
    fit.kernel = kernel;
    fit.dim = inputs.cols();
    fit.raw_inputs = inputs;
    fit.raw_targets = targets;
    // the Mahalanobis metric is learned on inputs scaled into [-1, 1]; ARD kernels see raw inputs
    const double max_abs = inputs.cwiseAbs().maxCoeff();
    fit.input_scale = kernel == KernelType::Mahalanobis && max_abs > 0.0 ? max_abs : 1.0;
    fit.output_shift = targets.mean();
    const double n = static_cast<double>(targets.size());
    const double var = n > 1 ? (targets.array() - fit.output_shift).square().sum() / (n - 1.0) : 0.0;
    const double sd = std::sqrt(var);
    fit.output_scale = sd > 1e-12 * std::max(1.0, std::abs(fit.output_shift)) ? sd : 1.0;
    fit.inputs = inputs / fit.input_scale;
    fit.targets = (targets.array() - fit.output_shift).matrix() / fit.output_scale;
    fit.codec = HyperCodec{kernel, fit.dim, options.noise_floor};

    ceres::GradientProblemSolver::Options solver_options;
    solver_options.line_search_direction_type = ceres::LBFGS;
    solver_options.max_num_iterations = options.max_iterations;
    solver_options.function_tolerance = 1e-10;
    solver_options.gradient_tolerance = 1e-8;
    solver_options.parameter_tolerance = 1e-10;
    solver_options.logging_type = ceres::SILENT;
    solver_options.minimizer_progress_to_stdout = false;

    const ceres::GradientProblem problem(new NegativeLogPosterior(fit));
    bool found = false;
    double best_value = -std::numeric_limits<double>::infinity();
    Vector best_theta;
    for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
        Vector theta;
        if (restart == 0 && options.warm_start && options.warm_start->size() == fit.codec.size()) {
            theta = *options.warm_start;
        } else {
            Rng rng = make_rng(derive_seed(options.seed, 0x6670, static_cast<std::uint64_t>(restart)));
            theta = random_start(fit.codec, rng);
        }
        double initial_cost = 0.0;
        if (!problem.Evaluate(theta.data(), &initial_cost, nullptr)) continue;
        ceres::GradientProblemSolver::Summary summary;
        ceres::Solve(solver_options, problem, theta.data(), &summary);
        double cost = 0.0;
        if (!problem.Evaluate(theta.data(), &cost, nullptr) || !std::isfinite(cost)) continue;
        if (!found || -cost > best_value) {
            found = true;
            best_value = -cost;
            best_theta = theta;
        }
    }
    if (!found) throw FitError("fit_map: every restart failed numerically");

    fit.theta = best_theta;
    fit.params = fit.codec.decode(best_theta);
    fit.log_posterior = best_value;
    fit.laplace_variances = Vector::Zero(fit.codec.metric_size());
    fit.components.push_back(build_component(fit, fit.params.metric));
    return fit;
}

GPFit with_laplace_samples(const GPFit& fit, int m, std::uint64_t seed, double variance_scale) {
    if (m < 1) throw std::invalid_argument("with_laplace_samples: m must be >= 1");
    GPFit out = fit;
    const Index p = fit.codec.metric_size();
    Vector variances(p);
    for (Index i = 0; i < p; ++i) {
        const double h = 1e-4 * std::max(1.0, std::abs(fit.theta(i)));
        double curvature = 1.0;
        try {
            Vector plus = fit.theta;
            Vector minus = fit.theta;
            plus(i) += h;
            minus(i) -= h;
            Vector gp;
            Vector gm;
            log_posterior(fit, plus, &gp);
            log_posterior(fit, minus, &gm);
            curvature = -(gp(i) - gm(i)) / (2.0 * h);
        } catch (const NumericalError&) {
            // Prior curvature of a unit-variance Normal.
            curvature = 1.0;
        }
        if (!std::isfinite(curvature)) curvature = 1.0;
        variances(i) = variance_scale / std::max(curvature, 1e-8);
    }
    out.laplace_variances = variances;

    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    out.components.clear();
    out.components.reserve(static_cast<std::size_t>(m));
    const Vector map_metric = fit.theta.head(p);
    for (int s = 0; s < m; ++s) {
        Vector metric = map_metric;
        for (Index i = 0; i < p; ++i) metric(i) += std::sqrt(variances(i)) * normal(rng);
        out.components.push_back(build_component(out, metric));
    }
    return out;
}

std::vector<Matrix> laplace_posterior_samples(const GPFit& fit, int m, std::uint64_t seed) {
    return with_laplace_samples(fit, m, seed).component_metrics();
}

PredictionGradient predict_with_gradient(const GPFit& fit, const Vector& y) {
    if (y.size() != fit.dim) throw DimensionError("predict: point dimension mismatch");
    const Vector x = y / fit.input_scale;
    const Index n = fit.inputs.rows();
    const double sv = fit.params.signal_variance;
    const KernelTransform probe(fit.kernel, fit.components.front().metric, fit.dim);

    double sum_mean = 0.0;
    double sum_var = 0.0;
    double sum_mean_sq = 0.0;
    Vector sum_dmean = Vector::Zero(fit.dim);
    Vector sum_dvar = Vector::Zero(fit.dim);
    Vector sum_mean_dmean = Vector::Zero(fit.dim);

    Vector k(n);
    Vector g(n);
    for (const auto& c : fit.components) {
        const Vector zx = c.transform * x;
        Matrix diff = (-c.transformed_inputs).rowwise() + zx.transpose();  // n x d, rows Δz_j
        for (Index j = 0; j < n; ++j) {
            double corr = 0.0;
            g(j) = sv * probe.gradient_scale(diff.row(j).squaredNorm(), corr);
            k(j) = sv * corr;
        }
        const double mean = fit.params.constant_mean + k.dot(c.alpha);
        const Vector v = c.chol.matrixL().solve(k);
        const double var = std::max(sv - v.squaredNorm(), 0.0);
        const Vector beta = c.chol.matrixU().solve(v);
        // ∂k_j/∂x = -g_j Mᵀ Δz_j
        const Vector dmean = -c.transform.transpose() * (diff.transpose() * c.alpha.cwiseProduct(g));
        const Vector dvar = 2.0 * c.transform.transpose() * (diff.transpose() * beta.cwiseProduct(g));
        sum_mean += mean;
        sum_var += var;
        sum_mean_sq += mean * mean;
        sum_dmean += dmean;
        sum_dvar += dvar;
        sum_mean_dmean += mean * dmean;
    }
    const double m = static_cast<double>(fit.components.size());
    const double mu = sum_mean / m;
    const double var = std::max(sum_var / m + sum_mean_sq / m - mu * mu, 0.0);
    const Vector dmu = sum_dmean / m;
    const Vector dvar = sum_dvar / m + 2.0 * sum_mean_dmean / m - 2.0 * mu * dmu;

    const double s = fit.output_scale;
    PredictionGradient out;
    out.prediction.mean = fit.output_shift + s * mu;
    out.prediction.variance = s * s * var;
    out.d_mean = (s / fit.input_scale) * dmu;
    out.d_variance = (s * s / fit.input_scale) * dvar;
    return out;
}

GaussianPrediction predict(const GPFit& fit, const Vector& y) {
    if (y.size() != fit.dim) throw DimensionError("predict: point dimension mismatch");
    const Vector x = y / fit.input_scale;
    const Index n = fit.inputs.rows();
    const double sv = fit.params.signal_variance;
    const KernelTransform probe(fit.kernel, fit.components.front().metric, fit.dim);

    double sum_mean = 0.0;
    double sum_var = 0.0;
    double sum_mean_sq = 0.0;
    Vector k(n);
    for (const auto& c : fit.components) {
        const Vector zx = c.transform * x;
        for (Index j = 0; j < n; ++j)
            k(j) = sv * probe.correlation((c.transformed_inputs.row(j).transpose() - zx).squaredNorm());
        const double mean = fit.params.constant_mean + k.dot(c.alpha);
        const double var = std::max(sv - c.chol.matrixL().solve(k).squaredNorm(), 0.0);
        sum_mean += mean;
        sum_var += var;
        sum_mean_sq += mean * mean;
    }
    const double m = static_cast<double>(fit.components.size());
    const double mu = sum_mean / m;
    const double var = std::max(sum_var / m + sum_mean_sq / m - mu * mu, 0.0);
    const double s = fit.output_scale;
    return {fit.output_shift + s * mu, s * s * var};
}

}  // namespace alebo
