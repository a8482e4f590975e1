#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alebo/benchmarks.hpp"
#include "alebo/common.hpp"
#include "alebo/embedding.hpp"
#include "alebo/kernels.hpp"

namespace alebo {

enum class Method { Alebo, Rembo, Hesbo, Sobol };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct RunConfig {
    std::string problem_id = "branin_d100";
    Method method = Method::Alebo;
    int embed_dim = 4;
    /// Initial points. REMBO spreads them round-robin over its projections.
    int n_init = 10;
    int n_bo = 40;
    std::uint64_t seed = 0;
    /// Seed of the random-subspace rotation for "_random" problems.
    std::uint64_t problem_seed = 0;
    int replicates = 1;

    int laplace_samples = 16;
    int fit_restarts = 8;
    int acquisition_restarts = 16;
    int acquisition_probes = 512;
    int rembo_projections = 4;

    /// ALEBO ablation knobs.
    KernelType alebo_kernel = KernelType::Mahalanobis;
    Strategy alebo_strategy = Strategy::Hypersphere;

    int total_evaluations() const { return n_init + n_bo; }
};

struct TraceRecord {
    int iteration = 0;
    std::optional<Vector> embedded;
    int projection = -1;  ///< REMBO projection index
    Vector ambient;
    double objective = 0.0;
    std::vector<double> constraints;
    bool feasible = true;
    /// Smallest feasible objective so far, +inf until the first feasible evaluation.
    double best_feasible = 0.0;
    double wall_ms = 0.0;
};

struct OptimizationTrace {
    RunConfig config;
    std::vector<TraceRecord> records;
    /// Ambient point of the best feasible evaluation (empty when none was feasible).
    Vector best_point;
    double best_value = 0.0;

    std::vector<double> best_so_far() const;
};

OptimizationTrace run_alebo(const RunConfig& config);
OptimizationTrace run_rembo(const RunConfig& config);
OptimizationTrace run_hesbo(const RunConfig& config);
OptimizationTrace run_sobol(const RunConfig& config);

/// Dispatches on config.method.
OptimizationTrace run(const RunConfig& config);

/// config.replicates runs; replicate i uses seed config.seed + i.
std::vector<OptimizationTrace> run_replicates(const RunConfig& config);

struct TraceSummary {
    std::vector<double> mean_best;
    std::vector<double> se_best;  ///< sample sd / sqrt(n); 0 for a single trace
    std::vector<double> mean_log_regret;
    /// Final best values at quantiles 0, 0.25, 0.5, 0.75, 1.
    std::vector<double> final_quantiles;
};

/// Per-iteration statistics of best-so-far curves. Throws DimensionError on length mismatch.
TraceSummary aggregate(const std::vector<std::vector<double>>& best_curves, double f_star);
TraceSummary aggregate(const std::vector<OptimizationTrace>& traces, double f_star);

}  // namespace alebo
