#include "alebo/common.hpp"

namespace alebo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index);
}

Vector standard_normal_vector(Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
}

Matrix standard_normal_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    // Row-major fill order so a given seed yields the same matrix regardless of storage order.
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    return m;
}

Vector uniform_vector(const Vector& lower, const Vector& upper, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector v(lower.size());
    for (Index i = 0; i < lower.size(); ++i) v(i) = lower(i) + unit(rng) * (upper(i) - lower(i));
    return v;
}

}  // namespace alebo
