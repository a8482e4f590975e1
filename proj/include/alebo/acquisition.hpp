#pragma once

#include <limits>
#include <vector>

#include "alebo/common.hpp"
#include "alebo/embedding.hpp"
#include "alebo/gp.hpp"

namespace alebo {

/// Expected improvement below `best` for minimization. Zero variance gives max(best - mean, 0).
double expected_improvement(const GaussianPrediction& prediction, double best);

/// EI with its partial derivatives with respect to the posterior mean and standard deviation.
struct EiValue {
    double value = 0.0;
    double d_mean = 0.0;
    double d_sd = 0.0;
};
EiValue expected_improvement_terms(double mean, double sd, double best);

/// Objective and constraint models sharing one embedding. A constraint is satisfied when its
/// value is <= 0. With no feasible observation yet `incumbent_best` is +inf and the
/// acquisition reduces to the probability of feasibility.
struct AcquisitionProblem {
    const GPFit* objective_model = nullptr;
    std::vector<const GPFit*> constraint_models;
    double incumbent_best = std::numeric_limits<double>::infinity();
};

/// EI(y) times the product of P(c_j(y) <= 0).
double feasibility_weighted_ei(const AcquisitionProblem& problem, const Vector& y);

/// Same value with its gradient in y.
double feasibility_weighted_ei(const AcquisitionProblem& problem, const Vector& y, Vector& gradient);

struct AcquisitionOptions {
    int restarts = 16;
    int probes = 512;
    int max_iterations = 100;
};

struct AcquisitionResult {
    Vector point;
    double value = 0.0;
};

/// Local constrained ascent from each row of `starts` on {y : a·y <= b}. Returns the best
/// point found, never worse than the best start. Ties go to the lexicographically smaller point,
/// so the result does not depend on the order of the starts.
AcquisitionResult maximize_from_starts(const AcquisitionProblem& problem, const Polytope& region,
                                       const Matrix& starts, const AcquisitionOptions& options = {});

/// Multi-start maximization: `options.probes` rejection-sampled candidates are scored, the best
/// `options.restarts` of them plus the rows of `extra_starts` are refined by local ascent.
AcquisitionResult optimize_acquisition(const AcquisitionProblem& problem, const PolytopeSampler& sampler,
                                       const Matrix& extra_starts, std::uint64_t seed,
                                       const AcquisitionOptions& options = {});

}  // namespace alebo
