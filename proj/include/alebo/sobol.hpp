#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "alebo/common.hpp"

namespace alebo {

/// D-dimensional Sobol sequence on [0,1)^D, optionally scrambled by a random digital shift.
/// The unscrambled sequence starts at (0.5, ..., 0.5).
class SobolSequence {
public:
    SobolSequence(int dim, bool scramble, std::uint64_t seed = 0);
    ~SobolSequence();
    SobolSequence(SobolSequence&&) noexcept;
    SobolSequence& operator=(SobolSequence&&) noexcept;

    int dim() const { return dim_; }
    Vector next();
    /// The next n points as rows.
    Matrix draw(Index n);

private:
    struct Engine;
    int dim_;
    std::unique_ptr<Engine> engine_;
    std::vector<std::uint64_t> shifts_;
};

/// n points of the sequence mapped affinely onto [-1,1]^D.
Matrix sobol_box_points(int dim, Index n, bool scramble, std::uint64_t seed);

}  // namespace alebo
