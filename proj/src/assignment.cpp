#include "meetkit/assignment.hpp"

#include <algorithm>
#include <limits>

#include "meetkit/error.hpp"

namespace meetkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment with dual potentials on an n x m matrix
// with n <= m. Returns row->col (all rows matched) and the optimal cost.
AssignmentResult solve_rows_le_cols(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = static_cast<int>(cost[0].size());

    // 1-based potentials; p[j] = row matched to column j (0 = none)
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[j])
                    continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
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
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    AssignmentResult res;
    res.row_to_col.assign(n, -1);
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0)
            res.row_to_col[p[j] - 1] = j - 1;
    }
    for (int i = 0; i < n; ++i)
        res.total_cost += cost[i][res.row_to_col[i]];
    return res;
}

void validate(const std::vector<std::vector<double>>& cost) {
    if (cost.empty())
        return;
    const size_t m = cost[0].size();
    for (const auto& row : cost)
        if (row.size() != m || m == 0)
            throw Error("InvalidMatrix", "cost matrix rows have inconsistent sizes");
}

} // namespace

AssignmentResult solve_assignment_min(const std::vector<std::vector<double>>& cost) {
    validate(cost);
    if (cost.empty())
        return {};

    const size_t n = cost.size();
    const size_t m = cost[0].size();
    if (n <= m)
        return solve_rows_le_cols(cost);

    // transpose, solve, invert the matching
    std::vector<std::vector<double>> t(m, std::vector<double>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j)
            t[j][i] = cost[i][j];
    AssignmentResult tr = solve_rows_le_cols(t);
    AssignmentResult res;
    res.row_to_col.assign(n, -1);
    for (size_t j = 0; j < m; ++j)
        if (tr.row_to_col[j] >= 0)
            res.row_to_col[tr.row_to_col[j]] = static_cast<int>(j);
    res.total_cost = tr.total_cost;
    return res;
}

AssignmentResult solve_assignment_max(const std::vector<std::vector<double>>& weight) {
    validate(weight);
    if (weight.empty())
        return {};
    std::vector<std::vector<double>> neg(weight.size());
    for (size_t i = 0; i < weight.size(); ++i) {
        neg[i].resize(weight[i].size());
        for (size_t j = 0; j < weight[i].size(); ++j)
            neg[i][j] = -weight[i][j];
    }
    AssignmentResult res = solve_assignment_min(neg);
    res.total_cost = -res.total_cost;
    return res;
}

} // namespace meetkit
