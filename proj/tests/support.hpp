#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "alebo/common.hpp"

namespace alebo::testing {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    return m;
}

inline Vector random_vector(Index n, Rng& rng, double scale = 1.0) {
    return random_matrix(n, 1, rng, scale).col(0);
}

inline Vector uniform_in(Index n, double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

inline int uniform_int(int lo, int hi, Rng& rng) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Central differences of f at x.
inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-5) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// Largest entrywise error relative to the largest numeric entry, so near-zero entries do not dominate.
inline double gradient_error(const Vector& analytic, const Vector& numeric) {
    const double scale = std::max(1e-6, numeric.cwiseAbs().maxCoeff());
    return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

}  // namespace alebo::testing
