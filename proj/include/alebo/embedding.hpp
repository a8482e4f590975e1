#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "alebo/common.hpp"

namespace alebo {

/// How the random projection is drawn.
///
/// Gaussian and Hypersphere draw the down-projection B (d_e x D) and project up with its
/// pseudo-inverse, restricted to the polytope -1 <= B†y <= 1. Hesbo uses a sparse sign
/// up-projection on the box [-1,1]^d_e. Rembo draws the up-projection A (D x d_e) with N(0,1)
/// entries, uses the box [-sqrt(d_e), sqrt(d_e)]^d_e and clips to the ambient box.
enum class Strategy { Gaussian, Hypersphere, Hesbo, Rembo };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

/// Axis-aligned box lower <= v <= upper.
struct Box {
    Vector lower;
    Vector upper;

    Index dim() const { return lower.size(); }
    bool contains(const Vector& v, double tolerance = 1e-9) const;
    Vector center() const { return 0.5 * (lower + upper); }
    static Box symmetric(Index dim, double half_width);
};

/// Linear inequality system a·y <= b.
struct Polytope {
    Matrix a;
    Vector b;

    Index rows() const { return a.rows(); }
    Index dim() const { return a.cols(); }
    bool contains(const Vector& y, double tolerance = 1e-9) const;
    /// Largest value of a·y - b.
    double max_violation(const Vector& y) const;
    static Polytope from_box(const Box& box);
};

using FeasibleRegion = std::variant<Polytope, Box>;

struct EmbeddingSpec {
    Strategy strategy = Strategy::Hypersphere;
    int ambient_dim = 0;
    int embed_dim = 0;
    std::uint64_t seed = 0;
    Matrix up_matrix;    ///< D x d_e, maps embedded y to ambient x before clipping
    Matrix down_matrix;  ///< d_e x D
    FeasibleRegion feasible_region;

    bool uses_polytope() const { return std::holds_alternative<Polytope>(feasible_region); }
};

EmbeddingSpec generate_embedding(Strategy strategy, int ambient_dim, int embed_dim, std::uint64_t seed);

/// Builds a Gaussian/Hypersphere style spec from an explicit down-projection.
EmbeddingSpec embedding_from_down_matrix(Strategy strategy, const Matrix& down, std::uint64_t seed = 0);

/// Moore-Penrose pseudo-inverse with singular values below 1e-12 * sigma_max treated as zero.
Matrix pseudo_inverse(const Matrix& m);

/// Componentwise clamp to [-1, 1].
Vector clip_to_box(const Vector& x);

/// Ambient point for embedded y. Always inside [-1,1]^D; clipping is a no-op for
/// polytope-feasible y under Gaussian/Hypersphere and for y in [-1,1]^d_e under Hesbo.
Vector up_project(const EmbeddingSpec& spec, const Vector& y);

/// The 2D-row system -1 <= B†y <= 1. Throws UnsupportedStrategyError for box-bounded strategies.
Polytope polytope_of(const EmbeddingSpec& spec);

/// The feasible region of a spec as a polytope (box regions become 2 d_e rows).
Polytope region_polytope(const EmbeddingSpec& spec);

/// Tightest enclosing box of a polytope, one LP per bound.
Box embedding_bounds(const Polytope& polytope);

/// Uniform rejection sampler on a polytope with the enclosing box as proposal.
class PolytopeSampler {
public:
    explicit PolytopeSampler(Polytope polytope);
    PolytopeSampler(Polytope polytope, Box bounds);

    /// n feasible points as rows of an n x d_e matrix.
    Matrix sample(Index n, Rng& rng) const;

    const Polytope& polytope() const { return polytope_; }
    const Box& bounds() const { return bounds_; }

    static constexpr long long kProposalCap = 10'000'000;
    static constexpr double kMinAcceptance = 1e-6;

private:
    bool accepts(const Vector& y) const;

    Polytope polytope_;
    Box bounds_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows_;
};

Matrix rejection_sample_feasible(const Polytope& polytope, Index n, std::uint64_t seed);

/// d x D matrix with orthonormal rows, distributed as the first d rows of a Haar rotation.
Matrix sample_haar_subspace(int ambient_dim, int dim, std::uint64_t seed);

}  // namespace alebo
