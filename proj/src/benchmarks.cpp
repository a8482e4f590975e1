#include "alebo/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <regex>
#include <set>

#include "alebo/embedding.hpp"

namespace alebo {

namespace {

constexpr double kHartmannAlpha[4] = {1.0, 1.2, 3.0, 3.2};
constexpr double kHartmannA[4][6] = {
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
};
constexpr double kHartmannP[4][6] = {
    {1312, 1696, 5569, 124, 8283, 5886},
    {2329, 4135, 8307, 3736, 1004, 9991},
    {2348, 1451, 3522, 2883, 3047, 6650},
    {4047, 8828, 8732, 5743, 1091, 381},
};

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (const double x : values) v(i++) = x;
    return v;
}

}  // namespace

double branin(const Vector& x) {
    if (x.size() != 2) throw DimensionError("branin: expects 2 coordinates");
    constexpr double pi = std::numbers::pi;
    const double b = 5.1 / (4.0 * pi * pi);
    const double c = 5.0 / pi;
    const double t = 1.0 / (8.0 * pi);
    const double inner = x(1) - b * x(0) * x(0) + c * x(0) - 6.0;
    return inner * inner + 10.0 * (1.0 - t) * std::cos(x(0)) + 10.0;
}

double hartmann6(const Vector& x) {
    if (x.size() != 6) throw DimensionError("hartmann6: expects 6 coordinates");
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double diff = x(j) - 1e-4 * kHartmannP[i][j];
            inner += kHartmannA[i][j] * diff * diff;
        }
        total += kHartmannAlpha[i] * std::exp(-inner);
    }
    return -total;
}

GramacyValue gramacy(const Vector& x) {
    if (x.size() != 2) throw DimensionError("gramacy: expects 2 coordinates");
    GramacyValue v;
    v.objective = x(0) + x(1);
    v.c1 = 1.5 - x(0) - 2.0 * x(1) - 0.5 * std::sin(2.0 * std::numbers::pi * (x(0) * x(0) - 2.0 * x(1)));
    v.c2 = x(0) * x(0) + x(1) * x(1) - 1.5;
    return v;
}

TestProblem branin_problem() {
    TestProblem p;
    p.name = "branin";
    p.dim = 2;
    p.lower = vec({-5.0, 0.0});
    p.upper = vec({10.0, 15.0});
    p.objective = branin;
    p.optimum_value = 0.397887357729738;
    p.optimizers = {vec({-std::numbers::pi, 12.275}), vec({std::numbers::pi, 2.275}), vec({9.42477796076938, 2.475})};
    return p;
}

TestProblem hartmann6_problem() {
    TestProblem p;
    p.name = "hartmann6";
    p.dim = 6;
    p.lower = Vector::Zero(6);
    p.upper = Vector::Ones(6);
    p.objective = hartmann6;
    p.optimum_value = -3.32236801141551;
    p.optimizers = {vec({0.20168952, 0.15001069, 0.47687398, 0.27533243, 0.31165162, 0.65730054})};
    return p;
}

TestProblem gramacy_problem() {
    TestProblem p;
    p.name = "gramacy";
    p.dim = 2;
    p.lower = Vector::Zero(2);
    p.upper = Vector::Ones(2);
    p.objective = [](const Vector& x) { return gramacy(x).objective; };
    p.constraints = {[](const Vector& x) { return gramacy(x).c1; }, [](const Vector& x) { return gramacy(x).c2; }};
    p.optimum_value = 0.599788052010068;
    p.optimizers = {vec({0.195122687213608, 0.404665364796460})};
    return p;
}

bool Evaluation::feasible(double tolerance) const {
    for (const double c : constraints)
        if (!(c <= tolerance)) return false;
    return true;
}

AmbientProblem::AmbientProblem(TestProblem base, int ambient_dim, std::vector<Index> active_indices)
    : base_(std::move(base)), ambient_dim_(ambient_dim), mapping_(Mapping::AxisAligned),
      active_(std::move(active_indices)) {
    if (static_cast<int>(active_.size()) != base_.dim)
        throw DimensionError("extend_axis_aligned: need one active index per native coordinate");
    std::set<Index> seen;
    for (const Index i : active_) {
        if (i < 0 || i >= ambient_dim_) throw DimensionError("extend_axis_aligned: active index out of range");
        if (!seen.insert(i).second) throw DimensionError("extend_axis_aligned: active indices must be distinct");
    }
}

AmbientProblem::AmbientProblem(TestProblem base, int ambient_dim, Matrix projection)
    : base_(std::move(base)), ambient_dim_(ambient_dim), mapping_(Mapping::RandomSubspace),
      projection_(std::move(projection)) {
    if (projection_.rows() != base_.dim || projection_.cols() != ambient_dim_)
        throw DimensionError("extend_random_subspace: projection must be d x D");
    ranges_ = projection_.cwiseAbs().rowwise().sum();
}

Vector AmbientProblem::to_native(const Vector& x) const {
    if (x.size() != ambient_dim_) throw DimensionError("AmbientProblem: point has the wrong dimension");
    Vector u(base_.dim);
    if (mapping_ == Mapping::AxisAligned) {
        for (int k = 0; k < base_.dim; ++k) u(k) = x(active_[static_cast<std::size_t>(k)]);
    } else {
        u = (projection_ * x).cwiseQuotient(ranges_);
    }
    return base_.lower.array() + 0.5 * (u.array() + 1.0) * (base_.upper - base_.lower).array();
}

Vector AmbientProblem::to_ambient(const Vector& native) const {
    if (native.size() != base_.dim) throw DimensionError("AmbientProblem: native point has the wrong dimension");
    const Vector u = (2.0 * (native - base_.lower).array() / (base_.upper - base_.lower).array() - 1.0).matrix();
    if (mapping_ == Mapping::AxisAligned) {
        Vector x = Vector::Zero(ambient_dim_);
        for (int k = 0; k < base_.dim; ++k) x(active_[static_cast<std::size_t>(k)]) = u(k);
        return x;
    }
    return projection_.transpose() * u.cwiseProduct(ranges_);
}

Evaluation AmbientProblem::evaluate(const Vector& x) const {
    const Vector native = to_native(x);
    Evaluation e;
    e.objective = base_.objective(native);
    e.constraints.reserve(base_.constraints.size());
    for (const auto& c : base_.constraints) e.constraints.push_back(c(native));
    return e;
}

AmbientProblem extend_axis_aligned(const TestProblem& base, int ambient_dim, std::vector<Index> active_indices) {
    if (ambient_dim < base.dim) throw DimensionError("extend_axis_aligned: D must be at least d");
    if (active_indices.empty())
        for (int k = 0; k < base.dim; ++k) active_indices.push_back(k);
    return AmbientProblem(base, ambient_dim, std::move(active_indices));
}

AmbientProblem extend_random_subspace(const TestProblem& base, int ambient_dim, std::uint64_t seed) {
    if (ambient_dim < base.dim) throw DimensionError("extend_random_subspace: D must be at least d");
    return AmbientProblem(base, ambient_dim, sample_haar_subspace(ambient_dim, base.dim, seed));
}

AmbientProblem make_problem(const std::string& id, std::uint64_t seed) {
    static const std::regex pattern(R"(^(branin|hartmann6|gramacy)(_random)?_d([0-9]+)$)");
    std::smatch m;
    if (!std::regex_match(id, m, pattern)) throw ConfigError("unknown problem id '" + id + "'");
    const std::string name = m[1];
    const bool random = m[2].matched;
    const int ambient_dim = std::stoi(m[3]);
    TestProblem base = name == "branin" ? branin_problem() : name == "hartmann6" ? hartmann6_problem() : gramacy_problem();
    if (ambient_dim < base.dim) throw ConfigError("problem '" + id + "': D is below the native dimension");
    return random ? extend_random_subspace(base, ambient_dim, seed) : extend_axis_aligned(base, ambient_dim);
}

double log_regret(double best, double f_star) { return std::log10(std::max(best - f_star, 1e-12)); }

std::vector<double> log_regret(const std::vector<double>& best_so_far, double f_star) {
    std::vector<double> out;
    out.reserve(best_so_far.size());
    for (const double b : best_so_far) out.push_back(log_regret(b, f_star));
    return out;
}

}  // namespace alebo
