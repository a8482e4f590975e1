#include "alebo/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace alebo {

namespace {

/// Rows below this infinity norm are treated as exactly zero.
double zero_row_threshold(const Matrix& a) {
    return a.size() > 0 ? 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) : 0.0;
}

enum class PhaseOutcome { Optimal, Unbounded, PivotLimit };

/// Dense tableau for min c·λ s.t. M λ = g, λ >= 0, with one artificial column per row.
class Tableau {
public:
    Tableau(const Matrix& m, const Vector& g, const LpOptions& options)
        : rows_(m.rows()), structural_(m.cols()), options_(options) {
        const Index cols = structural_ + rows_ + 1;
        t_ = Matrix::Zero(rows_ + 1, cols);
        basis_.resize(static_cast<std::size_t>(rows_));
        for (Index i = 0; i < rows_; ++i) {
            const double sign = g(i) < 0.0 ? -1.0 : 1.0;
            t_.row(i).head(structural_) = sign * m.row(i);
            t_(i, structural_ + i) = 1.0;
            t_(i, cols - 1) = sign * g(i);
            basis_[static_cast<std::size_t>(i)] = structural_ + i;
        }
    }

    Index rhs_col() const { return t_.cols() - 1; }
    Index obj_row() const { return rows_; }

    /// Phase one: minimize the sum of artificials. Returns the residual infeasibility.
    double phase_one(int& pivots) {
        t_.row(obj_row()).setZero();
        for (Index i = 0; i < rows_; ++i) {
            t_.row(obj_row()).head(structural_) -= t_.row(i).head(structural_);
            t_(obj_row(), rhs_col()) -= t_(i, rhs_col());
        }
        run(structural_ + rows_, pivots);
        return -t_(obj_row(), rhs_col());
    }

    /// Removes artificials left in the basis at zero level; rows that cannot be cleared are
    /// linearly dependent and are dropped.
    void drive_out_artificials(int& pivots) {
        for (Index i = 0; i < rows_;) {
            if (basis_[static_cast<std::size_t>(i)] < structural_) {
                ++i;
                continue;
            }
            Index best = -1;
            double best_abs = 1e-9;
            for (Index j = 0; j < structural_; ++j) {
                if (std::abs(t_(i, j)) > best_abs) {
                    best_abs = std::abs(t_(i, j));
                    best = j;
                }
            }
            if (best >= 0) {
                pivot(i, best);
                ++pivots;
                ++i;
            } else {
                remove_row(i);
            }
        }
    }

    PhaseOutcome phase_two(const Vector& cost, int& pivots) {
        t_.row(obj_row()).setZero();
        t_.row(obj_row()).head(structural_) = cost.transpose();
        for (Index i = 0; i < rows_; ++i) {
            const Index bj = basis_[static_cast<std::size_t>(i)];
            const double cb = bj < structural_ ? cost(bj) : 0.0;
            if (cb != 0.0) t_.row(obj_row()) -= cb * t_.row(i);
        }
        return run(structural_, pivots);
    }

    double objective() const { return -t_(obj_row(), rhs_col()); }
    const std::vector<Index>& basis() const { return basis_; }
    Index rows() const { return rows_; }

private:
    /// Simplex iterations over entering candidates [0, allowed).
    PhaseOutcome run(Index allowed, int& pivots) {
        const double tol = options_.tolerance;
        bool bland = false;
        int degenerate_run = 0;
        while (true) {
            if (pivots >= options_.max_pivots) return PhaseOutcome::PivotLimit;
            Index enter = -1;
            double most_negative = -tol;
            for (Index j = 0; j < allowed; ++j) {
                const double d = t_(obj_row(), j);
                if (d < -tol) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    if (d < most_negative) {
                        most_negative = d;
                        enter = j;
                    }
                }
            }
            if (enter < 0) return PhaseOutcome::Optimal;

            Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < rows_; ++i) {
                const double a = t_(i, enter);
                if (a <= options_.pivot_tolerance) continue;
                best_ratio = std::min(best_ratio, std::max(t_(i, rhs_col()), 0.0) / a);
            }
            // Among (near-)tied rows prefer the largest pivot, or the lowest basic index under Bland.
            for (Index i = 0; i < rows_; ++i) {
                const double a = t_(i, enter);
                if (a <= options_.pivot_tolerance) continue;
                if (std::max(t_(i, rhs_col()), 0.0) / a > best_ratio + 1e-12) continue;
                if (leave < 0) {
                    leave = i;
                } else if (bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                                 : a > t_(leave, enter)) {
                    leave = i;
                }
            }
            if (leave < 0) return PhaseOutcome::Unbounded;

            if (best_ratio <= tol) {
                if (++degenerate_run > options_.degenerate_pivot_limit) bland = true;
            } else {
                degenerate_run = 0;
            }
            pivot(leave, enter);
            ++pivots;
        }
    }

    void pivot(Index row, Index col) {
        t_.row(row) /= t_(row, col);
        for (Index i = 0; i <= rows_; ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f != 0.0) t_.row(i) -= f * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    void remove_row(Index row) {
        const Index n = t_.rows();
        t_.block(row, 0, n - row - 1, t_.cols()) = t_.block(row + 1, 0, n - row - 1, t_.cols()).eval();
        t_.conservativeResize(n - 1, Eigen::NoChange);
        basis_.erase(basis_.begin() + row);
        --rows_;
    }

    Matrix t_;
    std::vector<Index> basis_;
    Index rows_;
    Index structural_;
    LpOptions options_;
};

}  // namespace

LpResult minimize_linear(const Vector& cost, const Matrix& a, const Vector& b, const LpOptions& options) {
    if (a.cols() != cost.size() || a.rows() != b.size())
        throw DimensionError("minimize_linear: inconsistent shapes");
    const Index n = a.cols();
    const double tol = options.tolerance;

    // Normalize rows; (numerically) zero rows are either vacuous or prove infeasibility.
    const double zero_row = zero_row_threshold(a);
    std::vector<Index> kept;
    kept.reserve(static_cast<std::size_t>(a.rows()));
    for (Index i = 0; i < a.rows(); ++i) {
        if (a.row(i).lpNorm<Eigen::Infinity>() > zero_row) {
            kept.push_back(i);
        } else if (b(i) < -tol) {
            return {LpStatus::Infeasible, 0.0, Vector(), 0};
        }
    }
    const Index m = static_cast<Index>(kept.size());
    Matrix as(m, n);
    Vector bs(m);
    for (Index k = 0; k < m; ++k) {
        const Index i = kept[static_cast<std::size_t>(k)];
        const double s = a.row(i).lpNorm<Eigen::Infinity>();
        as.row(k) = a.row(i) / s;
        bs(k) = b(i) / s;
    }

    // Dual: min bs·λ s.t. asᵀ λ = -cost, λ >= 0.
    Tableau tableau(as.transpose(), -cost, options);
    LpResult result;
    const double infeasibility = tableau.phase_one(result.pivots);
    if (infeasibility > tol * (1.0 + cost.lpNorm<Eigen::Infinity>())) {
        // Dual infeasible: primal is unbounded when it has a feasible point at all.
        const FeasibilityResult f = find_feasible_point(as, bs, tol);
        result.status = f.feasible ? LpStatus::Unbounded : LpStatus::Infeasible;
        return result;
    }
    tableau.drive_out_artificials(result.pivots);
    const PhaseOutcome outcome = tableau.phase_two(bs, result.pivots);
    if (outcome == PhaseOutcome::Unbounded) {
        result.status = LpStatus::Infeasible;
        return result;
    }
    if (outcome == PhaseOutcome::PivotLimit) throw NumericalError("minimize_linear: pivot limit reached");

    // Complementary slackness: constraints whose multipliers are basic are tight at the optimum.
    std::vector<Index> tight;
    for (Index bj : tableau.basis())
        if (bj < m) tight.push_back(bj);
    Vector point = Vector::Zero(n);
    if (!tight.empty()) {
        Matrix at(static_cast<Index>(tight.size()), n);
        Vector bt(static_cast<Index>(tight.size()));
        for (std::size_t k = 0; k < tight.size(); ++k) {
            at.row(static_cast<Index>(k)) = as.row(tight[k]);
            bt(static_cast<Index>(k)) = bs(tight[k]);
        }
        point = at.completeOrthogonalDecomposition().solve(bt);
    }
    result.status = LpStatus::Optimal;
    result.value = -tableau.objective();
    result.point = std::move(point);
    return result;
}

FeasibilityResult find_feasible_point(const Matrix& a, const Vector& b, double tolerance) {
    if (a.rows() != b.size()) throw DimensionError("find_feasible_point: inconsistent shapes");
    const Index m = a.rows();
    const Index n = a.cols();
    FeasibilityResult out;
    if (m == 0) {
        out.feasible = true;
        out.point = Vector::Zero(n);
        out.max_violation = -std::numeric_limits<double>::infinity();
        return out;
    }

    const double zero_row = zero_row_threshold(a);
    Matrix as(m, n);
    Vector bs(m);
    for (Index i = 0; i < m; ++i) {
        const double s = a.row(i).lpNorm<Eigen::Infinity>();
        if (s > zero_row) {
            as.row(i) = a.row(i) / s;
            bs(i) = b(i) / s;
        } else {
            as.row(i).setZero();
            bs(i) = std::min(b(i), 1.0);
        }
    }

    // min t s.t. as·w - t <= bs, t >= -1. Always feasible and bounded.
    Matrix aug = Matrix::Zero(m + 1, n + 1);
    aug.topLeftCorner(m, n) = as;
    aug.col(n).head(m).setConstant(-1.0);
    aug(m, n) = -1.0;
    Vector baug(m + 1);
    baug.head(m) = bs;
    baug(m) = 1.0;
    Vector cost = Vector::Zero(n + 1);
    cost(n) = 1.0;

    const LpResult lp = minimize_linear(cost, aug, baug);
    if (lp.status != LpStatus::Optimal) throw NumericalError("find_feasible_point: auxiliary LP failed");

    out.point = lp.point.head(n);
    out.max_violation = (as * out.point - bs).maxCoeff();
    out.feasible = out.max_violation <= tolerance;
    return out;
}

}  // namespace alebo
