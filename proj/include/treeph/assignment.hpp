#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace treeph {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Returns row -> column.
std::vector<std::size_t> solve_assignment(const Eigen::MatrixXd& cost, double* total_cost = nullptr);

/// True when the bipartite graph {(r, c) : allowed(r, c)} on an n x n grid
/// has a perfect matching (Hopcroft-Karp).
bool has_perfect_matching(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed);

}  // namespace treeph
