#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alebo/common.hpp"

namespace alebo {

double branin(const Vector& x);
double hartmann6(const Vector& x);

struct GramacyValue {
    double objective = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};
GramacyValue gramacy(const Vector& x);

using ScalarFunction = std::function<double(const Vector&)>;

/// A low-dimensional problem on its native box. Constraints are satisfied when <= 0.
struct TestProblem {
    std::string name;
    int dim = 0;
    Vector lower;
    Vector upper;
    ScalarFunction objective;
    std::vector<ScalarFunction> constraints;
    double optimum_value = 0.0;
    std::vector<Vector> optimizers;
};

TestProblem branin_problem();
TestProblem hartmann6_problem();
TestProblem gramacy_problem();

struct Evaluation {
    double objective = 0.0;
    std::vector<double> constraints;

    bool feasible(double tolerance = 0.0) const;
};

enum class Mapping { AxisAligned, RandomSubspace };

/// A TestProblem evaluated on [-1,1]^D.
class AmbientProblem {
public:
    AmbientProblem(TestProblem base, int ambient_dim, std::vector<Index> active_indices);
    AmbientProblem(TestProblem base, int ambient_dim, Matrix projection);

    const TestProblem& base() const { return base_; }
    int ambient_dim() const { return ambient_dim_; }
    Mapping mapping() const { return mapping_; }
    const std::vector<Index>& active_indices() const { return active_; }
    /// d x D with orthonormal rows (RandomSubspace only).
    const Matrix& projection() const { return projection_; }
    /// Half-widths r_k of the reachable range of (T x)_k (RandomSubspace only).
    const Vector& ranges() const { return ranges_; }
    std::size_t num_constraints() const { return base_.constraints.size(); }
    double optimum_value() const { return base_.optimum_value; }

    Vector to_native(const Vector& x) const;
    /// An ambient point mapping to `native`: zeros off the active coordinates for AxisAligned,
    /// the least-norm preimage Tᵀ(...) for RandomSubspace (which can leave [-1,1]^D).
    Vector to_ambient(const Vector& native) const;

    Evaluation evaluate(const Vector& x) const;
    double objective(const Vector& x) const { return evaluate(x).objective; }

private:
    TestProblem base_;
    int ambient_dim_;
    Mapping mapping_;
    std::vector<Index> active_;
    Matrix projection_;
    Vector ranges_;
};

/// Active coordinates default to the first base.dim coordinates.
AmbientProblem extend_axis_aligned(const TestProblem& base, int ambient_dim, std::vector<Index> active_indices = {});

/// f(x) = f_d(s(T x)) with T the first d rows of a Haar rotation and s the affine map sending
/// [-r_k, r_k] (r_k the L1 norm of row k) onto the native range of coordinate k.
AmbientProblem extend_random_subspace(const TestProblem& base, int ambient_dim, std::uint64_t seed);

/// Registry: "<branin|hartmann6|gramacy>[_random]_d<D>", e.g. "branin_d100" or
/// "hartmann6_random_d1000". The seed only matters for random-subspace problems.
AmbientProblem make_problem(const std::string& id, std::uint64_t seed = 0);

/// log10(max(best - f_star, 1e-12)).
double log_regret(double best, double f_star);
std::vector<double> log_regret(const std::vector<double>& best_so_far, double f_star);

}  // namespace alebo
