#include "alebo/embedding.hpp"

#include <cmath>
#include <utility>
#include <vector>
#include <limits>

#include "alebo/lp.hpp"

namespace alebo {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::Gaussian: return "gaussian";
        case Strategy::Hypersphere: return "hypersphere";
        case Strategy::Hesbo: return "hesbo";
        case Strategy::Rembo: return "rembo";
    }
    return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
    if (name == "gaussian") return Strategy::Gaussian;
    if (name == "hypersphere") return Strategy::Hypersphere;
    if (name == "hesbo") return Strategy::Hesbo;
    if (name == "rembo") return Strategy::Rembo;
    throw ConfigError("unknown embedding strategy: " + std::string(name));
}

bool Box::contains(const Vector& v, double tolerance) const {
    if (v.size() != lower.size()) throw DimensionError("Box::contains: dimension mismatch");
    for (Index i = 0; i < v.size(); ++i)
        if (v(i) < lower(i) - tolerance || v(i) > upper(i) + tolerance) return false;
    return true;
}

Box Box::symmetric(Index dim, double half_width) {
    return {Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
}

bool Polytope::contains(const Vector& y, double tolerance) const {
    return max_violation(y) <= tolerance;
}

double Polytope::max_violation(const Vector& y) const {
    if (y.size() != a.cols()) throw DimensionError("Polytope: dimension mismatch");
    if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
    return (a * y - b).maxCoeff();
}

Polytope Polytope::from_box(const Box& box) {
    const Index d = box.dim();
    Polytope p;
    p.a.resize(2 * d, d);
    p.a << Matrix::Identity(d, d), -Matrix::Identity(d, d);
    p.b.resize(2 * d);
    p.b << box.upper, -box.lower;
    return p;
}

Matrix pseudo_inverse(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? 1e-12 * s(0) : 0.0;
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

Polytope polytope_from_up(const Matrix& up) {
    const Index big_d = up.rows();
    Polytope p;
    p.a.resize(2 * big_d, up.cols());
    p.a << up, -up;
    p.b = Vector::Ones(2 * big_d);
    return p;
}

void check_dims(int ambient_dim, int embed_dim) {
    if (embed_dim < 1 || ambient_dim < 1 || embed_dim > ambient_dim)
        throw DimensionError("embedding requires 1 <= d_e <= D, got D=" + std::to_string(ambient_dim) +
                             ", d_e=" + std::to_string(embed_dim));
}

}  // namespace

EmbeddingSpec embedding_from_down_matrix(Strategy strategy, const Matrix& down, std::uint64_t seed) {
    if (strategy != Strategy::Gaussian && strategy != Strategy::Hypersphere)
        throw UnsupportedStrategyError("embedding_from_down_matrix: only Gaussian/Hypersphere");
    check_dims(static_cast<int>(down.cols()), static_cast<int>(down.rows()));
    EmbeddingSpec spec;
    spec.strategy = strategy;
    spec.ambient_dim = static_cast<int>(down.cols());
    spec.embed_dim = static_cast<int>(down.rows());
    spec.seed = seed;
    spec.down_matrix = down;
    spec.up_matrix = pseudo_inverse(down);
    spec.feasible_region = polytope_from_up(spec.up_matrix);
    return spec;
}

EmbeddingSpec generate_embedding(Strategy strategy, int ambient_dim, int embed_dim, std::uint64_t seed) {
    check_dims(ambient_dim, embed_dim);
    Rng rng = make_rng(seed);
    EmbeddingSpec spec;
    switch (strategy) {
        case Strategy::Gaussian: {
            spec = embedding_from_down_matrix(strategy, standard_normal_matrix(embed_dim, ambient_dim, rng), seed);
            break;
        }
        case Strategy::Hypersphere: {
            Matrix b = standard_normal_matrix(embed_dim, ambient_dim, rng);
            for (Index j = 0; j < b.cols(); ++j) b.col(j) /= b.col(j).norm();
            spec = embedding_from_down_matrix(strategy, b, seed);
            break;
        }
        case Strategy::Hesbo: {
            std::uniform_int_distribution<int> column(0, embed_dim - 1);
            std::bernoulli_distribution coin(0.5);
            Matrix down = Matrix::Zero(embed_dim, ambient_dim);
            for (int i = 0; i < ambient_dim; ++i) {
                const int j = column(rng);
                down(j, i) = coin(rng) ? 1.0 : -1.0;
            }
            spec.strategy = strategy;
            spec.ambient_dim = ambient_dim;
            spec.embed_dim = embed_dim;
            spec.seed = seed;
            spec.down_matrix = down;
            spec.up_matrix = down.transpose();
            spec.feasible_region = Box::symmetric(embed_dim, 1.0);
            break;
        }
        case Strategy::Rembo: {
            spec.strategy = strategy;
            spec.ambient_dim = ambient_dim;
            spec.embed_dim = embed_dim;
            spec.seed = seed;
            spec.up_matrix = standard_normal_matrix(ambient_dim, embed_dim, rng);
            spec.down_matrix = pseudo_inverse(spec.up_matrix);
            spec.feasible_region = Box::symmetric(embed_dim, std::sqrt(static_cast<double>(embed_dim)));
            break;
        }
    }
    return spec;
}

Vector clip_to_box(const Vector& x) { return x.cwiseMax(-1.0).cwiseMin(1.0); }

Vector up_project(const EmbeddingSpec& spec, const Vector& y) {
    if (y.size() != spec.embed_dim) throw DimensionError("up_project: expected length d_e");
    return clip_to_box(spec.up_matrix * y);
}

Polytope polytope_of(const EmbeddingSpec& spec) {
    if (!spec.uses_polytope())
        throw UnsupportedStrategyError("polytope_of: strategy '" + std::string(to_string(spec.strategy)) +
                                       "' is box-bounded");
    return std::get<Polytope>(spec.feasible_region);
}

Polytope region_polytope(const EmbeddingSpec& spec) {
    if (spec.uses_polytope()) return std::get<Polytope>(spec.feasible_region);
    return Polytope::from_box(std::get<Box>(spec.feasible_region));
}

Box embedding_bounds(const Polytope& polytope) {
    const Index d = polytope.dim();
    Box box{Vector(d), Vector(d)};
    Vector cost = Vector::Zero(d);
    for (Index i = 0; i < d; ++i) {
        cost.setZero();
        cost(i) = 1.0;
        const LpResult lo = minimize_linear(cost, polytope.a, polytope.b);
        cost(i) = -1.0;
        const LpResult hi = minimize_linear(cost, polytope.a, polytope.b);
        if (lo.status == LpStatus::Unbounded || hi.status == LpStatus::Unbounded)
            throw NumericalError("embedding_bounds: polytope is unbounded");
        if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
            throw NumericalError("embedding_bounds: polytope is empty");
        box.lower(i) = lo.value;
        box.upper(i) = -hi.value;
    }
    return box;
}

PolytopeSampler::PolytopeSampler(Polytope polytope)
    : polytope_(std::move(polytope)), bounds_(embedding_bounds(polytope_)), rows_(polytope_.a) {}

PolytopeSampler::PolytopeSampler(Polytope polytope, Box bounds)
    : polytope_(std::move(polytope)), bounds_(std::move(bounds)), rows_(polytope_.a) {
    if (bounds_.dim() != polytope_.dim()) throw DimensionError("PolytopeSampler: bounds dimension mismatch");
}

bool PolytopeSampler::accepts(const Vector& y) const {
    const Index rows = polytope_.rows();
    for (Index i = 0; i < rows; ++i)
        if (rows_.row(i).dot(y) > polytope_.b(i)) return false;
    return true;
}

Matrix PolytopeSampler::sample(Index n, Rng& rng) const {
    if (n < 1) throw DimensionError("PolytopeSampler::sample: n must be >= 1");
    const Index d = polytope_.dim();
    const Index rows = polytope_.rows();
    Matrix out(n, d);
    // rows that reject often drift to the front of the scan order
    std::vector<Index> order(static_cast<std::size_t>(rows));
    for (Index i = 0; i < rows; ++i) order[static_cast<std::size_t>(i)] = i;
    const Vector width = bounds_.upper - bounds_.lower;
    // proposals come from a splitmix64 stream keyed off one draw of rng; mt19937_64 dominated the cost
    std::uint64_t state = rng();
    const auto next_unit = [&state] {
        std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<double>((x ^ (x >> 31)) >> 11) * 0x1.0p-53;
    };
    Vector y(d);
    long long proposals = 0;
    Index accepted = 0;
    while (accepted < n) {
        for (Index j = 0; j < d; ++j)
            y(j) = bounds_.lower(j) + next_unit() * width(j);
        ++proposals;
        bool ok = true;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const Index i = order[k];
            if (rows_.row(i).dot(y) > polytope_.b(i)) {
                if (k > 0) std::swap(order[k], order[k / 2]);
                ok = false;
                break;
            }
        }
        if (ok) out.row(accepted++) = y.transpose();
        if (proposals >= kProposalCap &&
            static_cast<double>(accepted) / static_cast<double>(proposals) < kMinAcceptance)
            throw SamplingError("rejection sampling acceptance rate below 1e-6 after 1e7 proposals; "
                                "use a smaller embedding dimension");
    }
    return out;
}

Matrix rejection_sample_feasible(const Polytope& polytope, Index n, std::uint64_t seed) {
    PolytopeSampler sampler(polytope);
    Rng rng = make_rng(seed);
    return sampler.sample(n, rng);
}

Matrix sample_haar_subspace(int ambient_dim, int dim, std::uint64_t seed) {
    if (dim < 1 || dim > ambient_dim) throw DimensionError("sample_haar_subspace: need 1 <= d <= D");
    Rng rng = make_rng(seed);
    const Matrix g = standard_normal_matrix(ambient_dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(ambient_dim, dim);
    const Matrix r = qr.matrixQR().topLeftCorner(dim, dim).triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    Matrix t = q.transpose();
    if (dim == ambient_dim && t.determinant() < 0.0) t.row(dim - 1) = -t.row(dim - 1);
    return t;
}

}  // namespace alebo
