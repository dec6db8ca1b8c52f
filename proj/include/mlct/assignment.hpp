#pragma once

#include <limits>
#include <vector>

#include "mlct/errors.hpp"

namespace mlct {

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

// Dense rectangular cost matrix. Forbidden pairings carry the kForbidden
// sentinel; the solver never returns one.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(int rows, int cols, double fill = kForbidden)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    // Standard birth/death augmentation for frame-to-frame linking: the
    // linking block top-left, a diagonal death block for the sources, a
    // diagonal birth block for the targets, and a bottom-right completion
    // block holding the minimum linking cost wherever the transposed pairing
    // is feasible. The result is square and always feasible.
    static CostMatrix augment_birth_death(const CostMatrix& links, double birth_cost,
                                          double death_cost);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

struct Assignment {
    std::vector<int> row_to_col;  // -1 where unassigned (never on a square solve)
    double cost = 0.0;
};

// Minimum-cost perfect assignment on a square matrix, O(n^3) shortest
// augmenting paths. Among assignments of equal total cost the one whose
// column sequence (row by row) is lexicographically smallest is returned.
// Throws InfeasibleError when no forbidden-free perfect assignment exists.
Assignment solve(const CostMatrix& costs);

} // namespace mlct
