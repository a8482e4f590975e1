#include "alebo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace alebo {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

bool lexicographically_less(const Vector& a, const Vector& b) {
    for (Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

bool better(double value, const Vector& point, double best_value, const Vector& best_point) {
    if (value > best_value) return true;
    return value == best_value && lexicographically_less(point, best_point);
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Gradient-projection ascent on {y : a·y <= b}. Blocking active constraints are added greedily
/// to a working set and the gradient is projected onto its null space.
class LocalAscent {
public:
    LocalAscent(const AcquisitionProblem& problem, const Polytope& region, int max_iterations)
        : problem_(problem), a_(region.a), b_(region.b), row_norms_(region.a.rowwise().norm()),
          max_iterations_(max_iterations) {}

    AcquisitionResult run(Vector y) const {
        const Index d = y.size();
        Vector g;
        double f = feasibility_weighted_ei(problem_, y, g);
        double step = 0.1 * std::sqrt(static_cast<double>(d));
        for (int it = 0; it < max_iterations_; ++it) {
            if (!std::isfinite(f) || !g.allFinite()) break;
            const Vector slack = b_ - a_ * y;
            std::vector<Index> active;
            for (Index i = 0; i < slack.size(); ++i)
                if (slack(i) <= 1e-9 * (1.0 + std::abs(b_(i)))) active.push_back(i);
            std::vector<bool> in_working(static_cast<std::size_t>(slack.size()), false);
            const Vector dir = projected_direction(g, active, in_working);
            const double norm = dir.norm();
            if (norm <= 1e-12 * std::max(1.0, g.norm())) break;
            const Vector u = dir / norm;

            const Vector au = a_ * u;
            double max_step = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < au.size(); ++i) {
                if (in_working[static_cast<std::size_t>(i)] || au(i) <= 1e-14 * row_norms_(i)) continue;
                max_step = std::min(max_step, std::max(slack(i), 0.0) / au(i));
            }
            double t = std::min(step, max_step);
            if (!(t > 0.0)) break;

            bool accepted = false;
            Vector y_new;
            Vector g_new;
            double f_new = f;
            for (int bt = 0; bt < 40; ++bt) {
                y_new = y + t * u;
                f_new = feasibility_weighted_ei(problem_, y_new, g_new);
                if (std::isfinite(f_new) && f_new >= f + 1e-4 * t * norm) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) break;
            const double gain = f_new - f;
            y = y_new;
            f = f_new;
            g = g_new;
            step = 2.0 * t;
            if (gain <= 1e-10 * std::abs(f)) break;
        }
        return {y, f};
    }

private:
    Vector projected_direction(const Vector& g, const std::vector<Index>& active, std::vector<bool>& in_working) const {
        Vector dir = g;
        std::vector<Vector> basis;
        const Index d = g.size();
        while (static_cast<Index>(basis.size()) < d) {
            Index pick = -1;
            double most = 0.0;
            for (const Index i : active) {
                if (in_working[static_cast<std::size_t>(i)]) continue;
                const double s = a_.row(i).dot(dir) / row_norms_(i);
                if (s > most + 1e-14) {
                    most = s;
                    pick = i;
                }
            }
            if (pick < 0) break;
            in_working[static_cast<std::size_t>(pick)] = true;
            Vector q = a_.row(pick).transpose();
            for (const auto& v : basis) q -= v.dot(q) * v;
            const double qn = q.norm();
            if (qn <= 1e-10 * row_norms_(pick)) return Vector::Zero(d);
            q /= qn;
            dir -= q.dot(dir) * q;
            basis.push_back(std::move(q));
        }
        if (static_cast<Index>(basis.size()) == d) return Vector::Zero(d);
        return dir;
    }

    const AcquisitionProblem& problem_;
    RowMatrix a_;
    Vector b_;
    Vector row_norms_;
    int max_iterations_;
};

}  // namespace

EiValue expected_improvement_terms(double mean, double sd, double best) {
    EiValue out;
    if (!(sd > 0.0)) {
        out.value = std::max(best - mean, 0.0);
        out.d_mean = best > mean ? -1.0 : 0.0;
        return out;
    }
    const double z = (best - mean) / sd;
    const double cdf = normal_cdf(z);
    const double pdf = normal_pdf(z);
    out.value = std::max((best - mean) * cdf + sd * pdf, 0.0);
    out.d_mean = -cdf;
    out.d_sd = pdf;
    return out;
}

double expected_improvement(const GaussianPrediction& prediction, double best) {
    return expected_improvement_terms(prediction.mean, std::sqrt(std::max(prediction.variance, 0.0)), best).value;
}

double feasibility_weighted_ei(const AcquisitionProblem& problem, const Vector& y) {
    double value = 1.0;
    if (std::isfinite(problem.incumbent_best))
        value = expected_improvement(predict(*problem.objective_model, y), problem.incumbent_best);
    for (const GPFit* c : problem.constraint_models) {
        const GaussianPrediction p = predict(*c, y);
        const double sd = std::sqrt(std::max(p.variance, 0.0));
        value *= sd > 0.0 ? normal_cdf(-p.mean / sd) : (p.mean <= 0.0 ? 1.0 : 0.0);
    }
    return value;
}

double feasibility_weighted_ei(const AcquisitionProblem& problem, const Vector& y, Vector& gradient) {
    double value = 1.0;
    gradient = Vector::Zero(y.size());
    if (std::isfinite(problem.incumbent_best)) {
        const PredictionGradient pg = predict_with_gradient(*problem.objective_model, y);
        const double sd = std::sqrt(std::max(pg.prediction.variance, 0.0));
        const EiValue ei = expected_improvement_terms(pg.prediction.mean, sd, problem.incumbent_best);
        value = ei.value;
        gradient = ei.d_mean * pg.d_mean;
        if (sd > 0.0) gradient += ei.d_sd * pg.d_variance / (2.0 * sd);
    }
    for (const GPFit* c : problem.constraint_models) {
        const PredictionGradient pg = predict_with_gradient(*c, y);
        const double mu = pg.prediction.mean;
        const double sd = std::sqrt(std::max(pg.prediction.variance, 0.0));
        double prob = mu <= 0.0 ? 1.0 : 0.0;
        Vector d_prob = Vector::Zero(y.size());
        if (sd > 0.0) {
            const double u = -mu / sd;
            prob = normal_cdf(u);
            const Vector d_sd = pg.d_variance / (2.0 * sd);
            d_prob = normal_pdf(u) * (-pg.d_mean / sd + (mu / (sd * sd)) * d_sd);
        }
        gradient = gradient * prob + value * d_prob;
        value *= prob;
    }
    return value;
}

AcquisitionResult maximize_from_starts(const AcquisitionProblem& problem, const Polytope& region,
                                       const Matrix& starts, const AcquisitionOptions& options) {
    if (starts.cols() != region.dim()) throw DimensionError("maximize_from_starts: start dimension mismatch");
    const LocalAscent ascent(problem, region, options.max_iterations);
    bool found = false;
    AcquisitionResult best;
    for (Index s = 0; s < starts.rows(); ++s) {
        const Vector start = starts.row(s).transpose();
        if (region.max_violation(start) > 1e-9) continue;
        const double start_value = feasibility_weighted_ei(problem, start);
        AcquisitionResult local{start, start_value};
        try {
            AcquisitionResult refined = ascent.run(start);
            if (region.max_violation(refined.point) <= 1e-9 && refined.value >= start_value) local = std::move(refined);
        } catch (const std::exception&) {
            // Keep the start point.
        }
        if (!std::isfinite(local.value)) continue;
        if (!found || better(local.value, local.point, best.value, best.point)) {
            found = true;
            best = std::move(local);
        }
    }
    if (!found) throw SamplingError("maximize_from_starts: no feasible start point");
    return best;
}

AcquisitionResult optimize_acquisition(const AcquisitionProblem& problem, const PolytopeSampler& sampler,
                                       const Matrix& extra_starts, std::uint64_t seed,
                                       const AcquisitionOptions& options) {
    Rng rng = make_rng(seed);
    const Index dim = sampler.polytope().dim();
    Matrix probes(0, dim);
    try {
        probes = sampler.sample(std::max(1, options.probes), rng);
    } catch (const SamplingError&) {
        if (extra_starts.rows() == 0) throw;
    }
    std::vector<double> values(static_cast<std::size_t>(probes.rows()));
    for (Index i = 0; i < probes.rows(); ++i) {
        double v = -std::numeric_limits<double>::infinity();
        try {
            v = feasibility_weighted_ei(problem, probes.row(i).transpose());
        } catch (const std::exception&) {
        }
        values[static_cast<std::size_t>(i)] = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    }
    std::vector<Index> order(values.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index l, Index r) {
        return values[static_cast<std::size_t>(l)] > values[static_cast<std::size_t>(r)];
    });

    const Index top = std::min<Index>(options.restarts, probes.rows());
    Matrix starts(top + extra_starts.rows(), dim);
    for (Index i = 0; i < top; ++i) starts.row(i) = probes.row(order[static_cast<std::size_t>(i)]);
    if (extra_starts.rows() > 0) starts.bottomRows(extra_starts.rows()) = extra_starts;

    AcquisitionResult result;
    bool have_result = false;
    try {
        result = maximize_from_starts(problem, sampler.polytope(), starts, options);
        have_result = true;
    } catch (const std::exception&) {
    }
    if (probes.rows() > 0) {
        const Index i = order.front();
        const double v = values[static_cast<std::size_t>(i)];
        if (!have_result || v > result.value) {
            result = {probes.row(i).transpose(), v};
            have_result = true;
        }
    }
    if (!have_result) throw SamplingError("optimize_acquisition: no feasible candidate");
    return result;
}

}  // namespace alebo
