#include "alebo/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "alebo/acquisition.hpp"
#include "alebo/gp.hpp"
#include "alebo/sobol.hpp"

namespace alebo {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Seed streams under the replicate seed.
enum : std::uint64_t {
    kEmbeddingStream = 10,
    kInitStream = 11,
    kFitStream = 12,
    kLaplaceStream = 13,
    kAcquisitionStream = 14,
    kSobolStream = 15,
};

class TraceBuilder {
public:
    TraceBuilder(const RunConfig& config, const AmbientProblem& problem) : problem_(problem) {
        trace_.config = config;
        trace_.best_value = kInf;
        last_ = Clock::now();
    }

    const Evaluation& add(const Vector& ambient, std::optional<Vector> embedded, int projection) {
        TraceRecord r;
        r.iteration = static_cast<int>(trace_.records.size());
        r.embedded = std::move(embedded);
        r.projection = projection;
        r.ambient = ambient;
        last_eval_ = problem_.evaluate(ambient);
        r.objective = last_eval_.objective;
        r.constraints = last_eval_.constraints;
        r.feasible = last_eval_.feasible();
        if (r.feasible && r.objective < trace_.best_value) {
            trace_.best_value = r.objective;
            trace_.best_point = ambient;
        }
        r.best_feasible = trace_.best_value;
        const auto now = Clock::now();
        r.wall_ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        trace_.records.push_back(std::move(r));
        return last_eval_;
    }

    OptimizationTrace finish() { return std::move(trace_); }

private:
    const AmbientProblem& problem_;
    OptimizationTrace trace_;
    Evaluation last_eval_;
    Clock::time_point last_;
};

/// Observations in one embedding.
struct Dataset {
    std::vector<Vector> points;
    std::vector<double> objective;
    std::vector<std::vector<double>> constraints;  // per outcome
    std::vector<bool> feasible;

    explicit Dataset(std::size_t num_constraints) : constraints(num_constraints) {}

    void add(const Vector& y, const Evaluation& e) {
        points.push_back(y);
        objective.push_back(e.objective);
        for (std::size_t j = 0; j < constraints.size(); ++j) constraints[j].push_back(e.constraints[j]);
        feasible.push_back(e.feasible());
    }

    std::size_t size() const { return points.size(); }

    Matrix inputs() const {
        Matrix x(static_cast<Index>(points.size()), points.front().size());
        for (std::size_t i = 0; i < points.size(); ++i) x.row(static_cast<Index>(i)) = points[i].transpose();
        return x;
    }

    double incumbent() const {
        double best = kInf;
        for (std::size_t i = 0; i < size(); ++i)
            if (feasible[i]) best = std::min(best, objective[i]);
        return best;
    }

    /// Best feasible point, or the lowest objective when nothing is feasible yet.
    const Vector& best_point() const {
        std::size_t pick = 0;
        bool pick_feasible = feasible[0];
        for (std::size_t i = 1; i < size(); ++i) {
            if ((feasible[i] && !pick_feasible) ||
                (feasible[i] == pick_feasible && objective[i] < objective[pick])) {
                pick = i;
                pick_feasible = feasible[i];
            }
        }
        return points[pick];
    }
};

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())); }

/// One surrogate per outcome in a single embedding, with warm starts carried across iterations.
struct EmbeddedModel {
    EmbeddingSpec spec;
    PolytopeSampler sampler;
    KernelType kernel;
    int laplace_samples;
    Dataset data;
    std::vector<std::optional<Vector>> warm;
};

template <typename Error>
[[noreturn]] void rethrow_with_context(const Error& e, int iteration) {
    throw Error("iteration " + std::to_string(iteration) + ": " + e.what());
}

/// Fits the models on the current data and returns the next embedded point.
Vector propose(EmbeddedModel& m, const RunConfig& config, int iteration) {
    const auto it = static_cast<std::uint64_t>(iteration);
    try {
        const Matrix x = m.data.inputs();
        std::vector<GPFit> fits;
        const std::size_t outcomes = 1 + m.data.constraints.size();
        for (std::size_t j = 0; j < outcomes; ++j) {
            const Vector targets = j == 0 ? to_vector(m.data.objective) : to_vector(m.data.constraints[j - 1]);
            FitOptions options;
            options.restarts = config.fit_restarts;
            options.seed = derive_seed(config.seed, kFitStream, it * 16 + j);
            options.warm_start = m.warm[j];
            GPFit fit = fit_map(x, targets, m.kernel, options);
            m.warm[j] = fit.theta;
            if (m.laplace_samples > 1)
                fit = with_laplace_samples(fit, m.laplace_samples, derive_seed(config.seed, kLaplaceStream, it * 16 + j));
            fits.push_back(std::move(fit));
        }
        AcquisitionProblem problem;
        problem.objective_model = &fits[0];
        for (std::size_t j = 1; j < fits.size(); ++j) problem.constraint_models.push_back(&fits[j]);
        problem.incumbent_best = m.data.incumbent();
        AcquisitionOptions options;
        options.restarts = config.acquisition_restarts;
        options.probes = config.acquisition_probes;
        const Matrix extra = m.data.best_point().transpose();
        return optimize_acquisition(problem, m.sampler, extra, derive_seed(config.seed, kAcquisitionStream, it), options)
            .point;
    } catch (const FitError& e) {
        rethrow_with_context(e, iteration);
    } catch (const NumericalError& e) {
        rethrow_with_context(e, iteration);
    } catch (const SamplingError& e) {
        rethrow_with_context(e, iteration);
    }
}

void validate(const RunConfig& config) {
    if (config.n_init < 0 || config.n_bo < 0) throw ConfigError("n_init and n_bo must be nonnegative");
    if (config.method != Method::Sobol) {
        if (config.n_init < 1) throw ConfigError("embedding methods need n_init >= 1");
        if (config.embed_dim < 1) throw ConfigError("embed_dim must be positive");
    }
    if (config.laplace_samples < 1) throw ConfigError("laplace_samples must be >= 1");
    if (config.rembo_projections < 1) throw ConfigError("rembo_projections must be >= 1");
}

EmbeddedModel make_box_model(const EmbeddingSpec& spec, KernelType kernel, int laplace, std::size_t outcomes) {
    const Box box = std::get<Box>(spec.feasible_region);
    return EmbeddedModel{spec, PolytopeSampler(Polytope::from_box(box), box), kernel, laplace, Dataset(outcomes - 1),
                         std::vector<std::optional<Vector>>(outcomes)};
}

/// Shared loop for single-embedding methods (ALEBO, HeSBO).
OptimizationTrace run_single_embedding(const RunConfig& config, EmbeddedModel model, const AmbientProblem& problem) {
    TraceBuilder trace(config, problem);
    Rng init_rng = make_rng(derive_seed(config.seed, kInitStream));
    const Matrix init = model.sampler.sample(config.n_init, init_rng);
    for (Index i = 0; i < init.rows(); ++i) {
        const Vector y = init.row(i).transpose();
        model.data.add(y, trace.add(up_project(model.spec, y), y, -1));
    }
    for (int t = 0; t < config.n_bo; ++t) {
        const Vector y = propose(model, config, config.n_init + t);
        model.data.add(y, trace.add(up_project(model.spec, y), y, -1));
    }
    return trace.finish();
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Alebo: return "alebo";
        case Method::Rembo: return "rembo";
        case Method::Hesbo: return "hesbo";
        case Method::Sobol: return "sobol";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    if (name == "alebo") return Method::Alebo;
    if (name == "rembo") return Method::Rembo;
    if (name == "hesbo") return Method::Hesbo;
    if (name == "sobol") return Method::Sobol;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<double> OptimizationTrace::best_so_far() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.best_feasible);
    return out;
}

OptimizationTrace run_alebo(const RunConfig& config) {
    validate(config);
    const AmbientProblem problem = make_problem(config.problem_id, config.problem_seed);
    const EmbeddingSpec spec = generate_embedding(config.alebo_strategy, problem.ambient_dim(), config.embed_dim,
                                                  derive_seed(config.seed, kEmbeddingStream));
    const std::size_t outcomes = 1 + problem.num_constraints();
    EmbeddedModel model{spec, PolytopeSampler(region_polytope(spec)), config.alebo_kernel, config.laplace_samples,
                        Dataset(outcomes - 1), std::vector<std::optional<Vector>>(outcomes)};
    return run_single_embedding(config, std::move(model), problem);
}

OptimizationTrace run_hesbo(const RunConfig& config) {
    validate(config);
    const AmbientProblem problem = make_problem(config.problem_id, config.problem_seed);
    const EmbeddingSpec spec = generate_embedding(Strategy::Hesbo, problem.ambient_dim(), config.embed_dim,
                                                  derive_seed(config.seed, kEmbeddingStream));
    return run_single_embedding(config, make_box_model(spec, KernelType::ArdMatern52, 1, 1 + problem.num_constraints()),
                                problem);
}

OptimizationTrace run_rembo(const RunConfig& config) {
    validate(config);
    const AmbientProblem problem = make_problem(config.problem_id, config.problem_seed);
    const int k = config.rembo_projections;
    std::vector<EmbeddedModel> models;
    for (int j = 0; j < k; ++j) {
        const EmbeddingSpec spec = generate_embedding(Strategy::Rembo, problem.ambient_dim(), config.embed_dim,
                                                      derive_seed(config.seed, kEmbeddingStream, static_cast<std::uint64_t>(j)));
        models.push_back(make_box_model(spec, KernelType::ArdMatern52, 1, 1 + problem.num_constraints()));
    }
    TraceBuilder trace(config, problem);
    Rng init_rng = make_rng(derive_seed(config.seed, kInitStream));
    const int total = config.total_evaluations();
    for (int t = 0; t < total; ++t) {
        EmbeddedModel& m = models[static_cast<std::size_t>(t % k)];
        Vector y;
        if (t < config.n_init || m.data.size() == 0) {
            y = m.sampler.sample(1, init_rng).row(0).transpose();
        } else {
            y = propose(m, config, t);
        }
        m.data.add(y, trace.add(up_project(m.spec, y), y, t % k));
    }
    return trace.finish();
}

OptimizationTrace run_sobol(const RunConfig& config) {
    validate(config);
    const AmbientProblem problem = make_problem(config.problem_id, config.problem_seed);
    TraceBuilder trace(config, problem);
    const Matrix points =
        sobol_box_points(problem.ambient_dim(), config.total_evaluations(), true, derive_seed(config.seed, kSobolStream));
    for (Index i = 0; i < points.rows(); ++i) trace.add(points.row(i).transpose(), std::nullopt, -1);
    return trace.finish();
}

OptimizationTrace run(const RunConfig& config) {
    switch (config.method) {
        case Method::Alebo: return run_alebo(config);
        case Method::Rembo: return run_rembo(config);
        case Method::Hesbo: return run_hesbo(config);
        case Method::Sobol: return run_sobol(config);
    }
    throw ConfigError("unknown method");
}

std::vector<OptimizationTrace> run_replicates(const RunConfig& config) {
    if (config.replicates < 1) throw ConfigError("replicates must be >= 1");
    std::vector<OptimizationTrace> out;
    for (int i = 0; i < config.replicates; ++i) {
        RunConfig c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(i);
        c.replicates = 1;
        out.push_back(run(c));
    }
    return out;
}

TraceSummary aggregate(const std::vector<std::vector<double>>& curves, double f_star) {
    if (curves.empty()) throw DimensionError("aggregate: no traces");
    const std::size_t length = curves.front().size();
    for (const auto& c : curves)
        if (c.size() != length) throw DimensionError("aggregate: traces differ in length");
    const double n = static_cast<double>(curves.size());
    TraceSummary s;
    for (std::size_t t = 0; t < length; ++t) {
        double sum = 0.0;
        double sum_regret = 0.0;
        for (const auto& c : curves) {
            sum += c[t];
            sum_regret += log_regret(c[t], f_star);
        }
        const double mean = sum / n;
        double se = 0.0;
        if (curves.size() > 1) {
            double ss = 0.0;
            for (const auto& c : curves) ss += (c[t] - mean) * (c[t] - mean);
            se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
        s.mean_best.push_back(mean);
        s.se_best.push_back(se);
        s.mean_log_regret.push_back(sum_regret / n);
    }
    if (length > 0) {
        std::vector<double> finals;
        for (const auto& c : curves) finals.push_back(c.back());
        std::sort(finals.begin(), finals.end());
        for (const double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const double pos = q * (n - 1.0);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, finals.size() - 1);
            const double frac = pos - static_cast<double>(lo);
            s.final_quantiles.push_back(finals[lo] + (frac > 0.0 ? frac * (finals[hi] - finals[lo]) : 0.0));
        }
    }
    return s;
}

TraceSummary aggregate(const std::vector<OptimizationTrace>& traces, double f_star) {
    std::vector<std::vector<double>> curves;
    curves.reserve(traces.size());
    for (const auto& t : traces) curves.push_back(t.best_so_far());
    return aggregate(curves, f_star);
}

}  // namespace alebo
