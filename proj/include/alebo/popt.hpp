#pragma once

#include <cstdint>
#include <vector>

#include "alebo/common.hpp"
#include "alebo/embedding.hpp"

namespace alebo {

/// One draw from the uniform prior over axis-aligned optima: d distinct active coordinates
/// and an optimum location z* uniform on [-1,1]^d.
struct OptimumDraw {
    std::vector<Index> coordinates;
    Matrix t;  ///< d x D, rows are the unit vectors of `coordinates`
    Vector z;
};

OptimumDraw draw_axis_aligned_optimum(int ambient_dim, int dim, Rng& rng);

struct PoptEstimate {
    double estimate = 0.0;
    long long n_mc = 0;
    double standard_error = 0.0;
};

/// Whether some y gives T·up·y = z* with -1 <= up·y <= 1, i.e. whether the embedding
/// {up·y} meets the optimal set {x in [-1,1]^D : T x = z*}. Solved as an LP over the null
/// space of T·up.
bool optimum_reachable(const Matrix& up, const Matrix& t, const Vector& z, double tolerance = 1e-7);

/// The test for an embedding given by its down-projection B (up-projection B†). Throws
/// NumericalError when B has rank below d_e.
bool embedding_contains_optimum(const Matrix& b, const Matrix& t, const Vector& z, double tolerance = 1e-7);

/// Monte Carlo estimate of the probability that a random embedding of the given strategy
/// contains a random axis-aligned optimum. Each draw uses the strategy's own up-projection
/// (B† for Gaussian/Hypersphere, the sparse sign matrix for Hesbo, A for Rembo without clipping).
PoptEstimate estimate_popt(Strategy strategy, int ambient_dim, int dim, int embed_dim, long long n_mc,
                           std::uint64_t seed);

/// d_e! / ((d_e - d)! d_e^d), the chance that HeSBO maps d active coordinates to distinct bins.
double hesbo_popt_analytic(int dim, int embed_dim);

/// Fraction of draws (A with N(0,1) entries, y uniform on [-sqrt(d_e), sqrt(d_e)]^d_e) with A·y
/// inside [-1,1]^D.
PoptEstimate interior_probability(int ambient_dim, int embed_dim, long long n_mc, std::uint64_t seed);

}  // namespace alebo
