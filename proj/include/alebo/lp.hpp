#pragma once

#include "alebo/common.hpp"

namespace alebo {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;  ///< optimal objective, valid when status == Optimal
    Vector point;        ///< optimal vertex, valid when status == Optimal
    int pivots = 0;
};

struct LpOptions {
    double tolerance = 1e-9;
    /// Smallest tableau entry accepted as a pivot.
    double pivot_tolerance = 1e-9;
    int max_pivots = 200000;
    /// Consecutive degenerate pivots tolerated under Dantzig pricing before switching to Bland's rule.
    int degenerate_pivot_limit = 50;
};

/// Minimizes cost·v subject to a·v <= b over free variables v.
///
/// The problem is solved through its dual (min b·λ s.t. aᵀλ = -cost, λ >= 0), whose tableau has
/// one row per variable rather than one per constraint. Systems with few variables and many
/// inequality rows (polytope bounds, embedding feasibility) therefore stay small.
LpResult minimize_linear(const Vector& cost, const Matrix& a, const Vector& b,
                         const LpOptions& options = {});

struct FeasibilityResult {
    bool feasible = false;
    /// Largest violation of the row-normalized system at `point` (negative when strictly interior).
    double max_violation = 0.0;
    Vector point;
};

/// Decides whether {v : a·v <= b} is nonempty, returning the point that minimizes the largest
/// row-normalized violation. Rows are scaled to unit infinity norm before the test.
FeasibilityResult find_feasible_point(const Matrix& a, const Vector& b, double tolerance = 1e-7);

}  // namespace alebo
