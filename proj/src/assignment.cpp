#include "treeph/assignment.hpp"

#include <limits>
#include <queue>

#include "treeph/error.hpp"

namespace treeph {

std::vector<std::size_t> solve_assignment(const Eigen::MatrixXd& cost, double* total_cost) {
  if (cost.rows() != cost.cols()) throw ArgumentError("assignment cost matrix must be square");
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based potentials; p[j] is the row matched to column j, 0 = free.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  if (total_cost) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) total += cost(r, row_to_col[r]);
    *total_cost = total;
  }
  return row_to_col;
}

bool has_perfect_matching(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed) {
  const int n = static_cast<int>(allowed.rows());
  if (allowed.cols() != n) throw ArgumentError("matching grid must be square");
  std::vector<std::vector<int>> adj(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (allowed(r, c)) adj[r].push_back(c);

  const int free = -1;
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> match_row(n, free), match_col(n, free), dist(n);

  auto bfs = [&] {
    std::queue<int> q;
    bool found = false;
    for (int r = 0; r < n; ++r) {
      if (match_row[r] == free) {
        dist[r] = 0;
        q.push(r);
      } else {
        dist[r] = inf;
      }
    }
    while (!q.empty()) {
      const int r = q.front();
      q.pop();
      for (int c : adj[r]) {
        const int next = match_col[c];
        if (next == free)
          found = true;
        else if (dist[next] == inf) {
          dist[next] = dist[r] + 1;
          q.push(next);
        }
      }
    }
    return found;
  };

  std::vector<std::size_t> cursor(n);
  auto dfs = [&](auto&& self, int r) -> bool {
    for (; cursor[r] < adj[r].size(); ++cursor[r]) {
      const int c = adj[r][cursor[r]];
      const int next = match_col[c];
      if (next == free || (dist[next] == dist[r] + 1 && self(self, next))) {
        match_row[r] = c;
        match_col[c] = r;
        ++cursor[r];
        return true;
      }
    }
    dist[r] = inf;
    return false;
  };

  int matched = 0;
  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (int r = 0; r < n; ++r)
      if (match_row[r] == free && dfs(dfs, r)) ++matched;
  }
  return matched == n;
}

}  // namespace treeph
