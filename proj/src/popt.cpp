#include "alebo/popt.hpp"

#include <cmath>
#include <numeric>

#include "alebo/lp.hpp"

namespace alebo {

namespace {

PoptEstimate make_estimate(long long hits, long long n) {
    PoptEstimate e;
    e.n_mc = n;
    e.estimate = static_cast<double>(hits) / static_cast<double>(n);
    e.standard_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(n));
    return e;
}

}  // namespace

OptimumDraw draw_axis_aligned_optimum(int ambient_dim, int dim, Rng& rng) {
    if (dim < 1 || dim > ambient_dim) throw DimensionError("draw_axis_aligned_optimum: need 1 <= d <= D");
    std::vector<Index> pool(static_cast<std::size_t>(ambient_dim));
    std::iota(pool.begin(), pool.end(), Index{0});
    OptimumDraw draw;
    for (int i = 0; i < dim; ++i) {
        std::uniform_int_distribution<Index> pick(i, ambient_dim - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
        draw.coordinates.push_back(pool[static_cast<std::size_t>(i)]);
    }
    draw.t = Matrix::Zero(dim, ambient_dim);
    for (int i = 0; i < dim; ++i) draw.t(i, draw.coordinates[static_cast<std::size_t>(i)]) = 1.0;
    draw.z = uniform_vector(Vector::Constant(dim, -1.0), Vector::Constant(dim, 1.0), rng);
    return draw;
}

bool optimum_reachable(const Matrix& up, const Matrix& t, const Vector& z, double tolerance) {
    if (t.cols() != up.rows() || t.rows() != z.size())
        throw DimensionError("optimum_reachable: shapes of up-projection, T and z* disagree");
    const Matrix e = t * up;
    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    svd.setThreshold(1e-10);
    const Index rank = smax > 0.0 ? svd.rank() : 0;
    const Vector y0 = rank > 0 ? Vector(svd.solve(z)) : Vector(Vector::Zero(up.cols()));
    if ((e * y0 - z).cwiseAbs().maxCoeff() > tolerance) return false;

    const Vector h = up * y0;
    const Index free_dims = up.cols() - rank;
    if (free_dims == 0) return h.cwiseAbs().maxCoeff() <= 1.0 + tolerance;
    const Matrix n = svd.matrixV().rightCols(free_dims);
    const Matrix g = up * n;
    const Index rows = g.rows();
    Matrix a(2 * rows, free_dims);
    Vector b(2 * rows);
    a.topRows(rows) = g;
    a.bottomRows(rows) = -g;
    b.head(rows) = Vector::Ones(rows) - h;
    b.tail(rows) = Vector::Ones(rows) + h;
    return find_feasible_point(a, b, tolerance).feasible;
}

bool embedding_contains_optimum(const Matrix& b, const Matrix& t, const Vector& z, double tolerance) {
    if (b.cols() != t.cols()) throw DimensionError("embedding_contains_optimum: B and T disagree on D");
    Eigen::JacobiSVD<Matrix> svd(b);
    const Vector s = svd.singularValues();
    if (s.size() < b.rows() || s(s.size() - 1) <= 1e-12 * s(0))
        throw NumericalError("embedding_contains_optimum: B is rank deficient");
    return optimum_reachable(pseudo_inverse(b), t, z, tolerance);
}

PoptEstimate estimate_popt(Strategy strategy, int ambient_dim, int dim, int embed_dim, long long n_mc,
                           std::uint64_t seed) {
    if (n_mc < 1) throw std::invalid_argument("estimate_popt: n_mc must be >= 1");
    long long hits = 0;
    for (long long k = 0; k < n_mc; ++k) {
        const auto index = static_cast<std::uint64_t>(k);
        const EmbeddingSpec spec = generate_embedding(strategy, ambient_dim, embed_dim, derive_seed(seed, 1, index));
        Rng rng = make_rng(derive_seed(seed, 2, index));
        const OptimumDraw draw = draw_axis_aligned_optimum(ambient_dim, dim, rng);
        if (optimum_reachable(spec.up_matrix, draw.t, draw.z)) ++hits;
    }
    return make_estimate(hits, n_mc);
}

double hesbo_popt_analytic(int dim, int embed_dim) {
    if (dim < 0 || embed_dim < 1) throw std::invalid_argument("hesbo_popt_analytic: need d >= 0 and d_e >= 1");
    if (dim > embed_dim) return 0.0;
    const double de = static_cast<double>(embed_dim);
    return std::exp(std::lgamma(de + 1.0) - std::lgamma(de - dim + 1.0) - dim * std::log(de));
}

PoptEstimate interior_probability(int ambient_dim, int embed_dim, long long n_mc, std::uint64_t seed) {
    if (n_mc < 1) throw std::invalid_argument("interior_probability: n_mc must be >= 1");
    if (ambient_dim < 1 || embed_dim < 1) throw DimensionError("interior_probability: dimensions must be positive");
    const double half = std::sqrt(static_cast<double>(embed_dim));
    const Vector lo = Vector::Constant(embed_dim, -half);
    const Vector hi = Vector::Constant(embed_dim, half);
    long long hits = 0;
    for (long long k = 0; k < n_mc; ++k) {
        Rng rng = make_rng(derive_seed(seed, 3, static_cast<std::uint64_t>(k)));
        const Matrix a = standard_normal_matrix(ambient_dim, embed_dim, rng);
        const Vector y = uniform_vector(lo, hi, rng);
        if ((a * y).cwiseAbs().maxCoeff() <= 1.0) ++hits;
    }
    return make_estimate(hits, n_mc);
}

}  // namespace alebo
