#include "mlct/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace mlct {

CostMatrix CostMatrix::augment_birth_death(const CostMatrix& links, double birth_cost,
                                           double death_cost) {
    const int ns = links.rows();
    const int nt = links.cols();
    double min_link = kForbidden;
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
            min_link = std::min(min_link, links.at(i, j));

    CostMatrix m(ns + nt, ns + nt, kForbidden);
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j)
            m.at(i, j) = links.at(i, j);
        m.at(i, nt + i) = death_cost;
    }
    for (int j = 0; j < nt; ++j) {
        m.at(ns + j, j) = birth_cost;
        for (int i = 0; i < ns; ++i)
            if (links.at(i, j) != kForbidden)
                m.at(ns + j, nt + i) = min_link;
    }
    return m;
}

namespace {

// Shortest-augmenting-path assignment with dual potentials. Works on a dense
// square matrix where forbidden entries were replaced by `big`; returns
// row->col plus the duals needed for the tie-break refinement.
struct SolverState {
    std::vector<int> row_to_col;
    std::vector<int> col_to_row;
    std::vector<double> u, v;  // row and column potentials
};

SolverState solve_square(const std::vector<double>& a, int n) {
    // 1-based internals, standard potentials formulation
    const double inf = std::numeric_limits<double>::max();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            const double* row = a.data() + static_cast<std::size_t>(i0 - 1) * n;
            for (int j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = row[j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    SolverState s;
    s.row_to_col.assign(n, -1);
    s.col_to_row.assign(n, -1);
    s.u.assign(n, 0.0);
    s.v.assign(n, 0.0);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) {
            s.row_to_col[p[j] - 1] = j - 1;
            s.col_to_row[j - 1] = p[j] - 1;
        }
    for (int i = 1; i <= n; ++i)
        s.u[i - 1] = u[i];
    for (int j = 1; j <= n; ++j)
        s.v[j - 1] = v[j];
    return s;
}

// Alternating-path search over tight edges, restricted to rows >= limit and
// columns not yet fixed by the lexicographic pass.
bool reroute(int row, int limit, int n, const std::vector<std::vector<int>>& tight,
             const std::vector<char>& col_fixed, std::vector<char>& visited,
             std::vector<int>& row_to_col, std::vector<int>& col_to_row) {
    for (int j : tight[row]) {
        if (col_fixed[j] || visited[j])
            continue;
        visited[j] = 1;
        const int owner = col_to_row[j];
        if (owner == -1 ||
            (owner >= limit && reroute(owner, limit, n, tight, col_fixed, visited,
                                       row_to_col, col_to_row))) {
            row_to_col[row] = j;
            col_to_row[j] = row;
            return true;
        }
    }
    return false;
}

// Every optimal assignment is complementary to the optimal duals, so the set
// of minimum-cost assignments is exactly the set of perfect matchings on the
// tight-edge subgraph. Greedily give each row, in order, the smallest tight
// column that still leaves the remaining rows matchable.
void lexicographic_refine(const std::vector<double>& a, int n, double eps, SolverState& s) {
    std::vector<std::vector<int>> tight(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (a[static_cast<std::size_t>(i) * n + j] - s.u[i] - s.v[j] <= eps)
                tight[i].push_back(j);
        // the assigned edge is tight by construction; keep it even if rounding
        // pushed its reduced cost past eps
        const int cur = s.row_to_col[i];
        auto it = std::lower_bound(tight[i].begin(), tight[i].end(), cur);
        if (it == tight[i].end() || *it != cur)
            tight[i].insert(it, cur);
    }

    std::vector<char> col_fixed(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j : tight[i]) {
            if (col_fixed[j])
                continue;
            if (s.row_to_col[i] == j)
                break;  // already the smallest reachable column
            // try to hand column j to row i, rerouting its current owner
            const int owner = s.col_to_row[j];
            const int freed = s.row_to_col[i];
            std::vector<int> r2c = s.row_to_col;
            std::vector<int> c2r = s.col_to_row;
            r2c[i] = j;
            c2r[j] = i;
            r2c[owner] = -1;
            c2r[freed] = -1;
            std::vector<char> visited(n, 0);
            visited[j] = 1;
            if (reroute(owner, i + 1, n, tight, col_fixed, visited, r2c, c2r)) {
                s.row_to_col = std::move(r2c);
                s.col_to_row = std::move(c2r);
                break;
            }
        }
        col_fixed[s.row_to_col[i]] = 1;
    }
}

} // namespace

Assignment solve(const CostMatrix& costs) {
    const int n = costs.rows();
    if (n != costs.cols())
        throw InputError("assignment requires a square (augmented) matrix");
    if (n == 0)
        return {};

    double abs_sum = 0.0;
    double abs_max = 0.0;
    for (int i = 0; i < n; ++i) {
        bool feasible = false;
        for (int j = 0; j < n; ++j)
            if (costs.at(i, j) != kForbidden) {
                feasible = true;
                abs_sum += std::abs(costs.at(i, j));
                abs_max = std::max(abs_max, std::abs(costs.at(i, j)));
            }
        if (!feasible)
            throw InfeasibleError("row " + std::to_string(i) + " has no feasible column");
    }
    const double big = 2.0 * abs_sum + 1.0;
    const double eps = 1e-9 * std::max(1.0, abs_max);

    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[static_cast<std::size_t>(i) * n + j] =
                costs.at(i, j) == kForbidden ? big : costs.at(i, j);

    SolverState s = solve_square(a, n);
    for (int i = 0; i < n; ++i)
        if (costs.at(i, s.row_to_col[i]) == kForbidden)
            throw InfeasibleError("no perfect assignment avoids forbidden pairings");

    lexicographic_refine(a, n, eps, s);

    Assignment out;
    out.row_to_col = s.row_to_col;
    for (int i = 0; i < n; ++i) {
        if (costs.at(i, s.row_to_col[i]) == kForbidden)
            throw InfeasibleError("no perfect assignment avoids forbidden pairings");
        out.cost += costs.at(i, s.row_to_col[i]);
    }
    return out;
}

} // namespace mlct
