#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace alebo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when matrix or vector shapes are inconsistent with an operation.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is requested for an embedding strategy that does not support it.
class UnsupportedStrategyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cholesky failure after the jitter ladder, unbounded LPs, rank-deficient projections.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

/// Derives an independent 64-bit seed for substream `index` of `stream` under `base`.
/// Counter-based, so results never depend on the order in which draws are evaluated.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

Vector standard_normal_vector(Index n, Rng& rng);
Matrix standard_normal_matrix(Index rows, Index cols, Rng& rng);
Vector uniform_vector(const Vector& lower, const Vector& upper, Rng& rng);

}  // namespace alebo
