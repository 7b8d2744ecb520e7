#pragma once

#include <cstddef>
#include <vector>

namespace meetkit {

struct AssignmentResult {
    std::vector<int> row_to_col; // -1 when a row is unassigned (rows > cols)
    double total_cost = 0.0;
};

// Exact minimum-cost one-to-one assignment on a dense rectangular cost
// matrix (rows x cols), Jonker-Volgenant shortest augmenting paths, O(n^2 m).
// With rows > cols, the cheapest subset of rows of size `cols` is matched.
AssignmentResult solve_assignment_min(const std::vector<std::vector<double>>& cost);

// Maximum-weight counterpart; entries <= 0 are still assignable.
AssignmentResult solve_assignment_max(const std::vector<std::vector<double>>& weight);

} // namespace meetkit
