#include "treeph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "treeph/assignment.hpp"
#include "treeph/error.hpp"

namespace treeph {

namespace {

struct SplitDiagrams {
  std::vector<Dot> finite_a, finite_b;
  std::vector<double> essential_costs;  // |birth difference| per matched essential pair
};

SplitDiagrams split(const PersistenceDiagram& a, const PersistenceDiagram& b, double ground_norm) {
  if (!(ground_norm >= 1.0)) throw ArgumentError("ground norm exponent must be >= 1");
  int dim = -1;
  for (const auto* d : {&a, &b})
    for (const auto& dot : d->dots) {
      if (dim >= 0 && dot.dimension != dim) throw ArgumentError("diagrams mix homological dimensions");
      dim = dot.dimension;
    }

  SplitDiagrams s;
  std::vector<double> ess_a, ess_b;
  for (const auto& d : a.dots) (d.essential() ? ess_a.push_back(d.birth) : s.finite_a.push_back(d));
  for (const auto& d : b.dots) (d.essential() ? ess_b.push_back(d.birth) : s.finite_b.push_back(d));
  if (ess_a.size() != ess_b.size())
    throw InfiniteDistanceError("diagrams have different numbers of essential dots");
  std::sort(ess_a.begin(), ess_a.end());
  std::sort(ess_b.begin(), ess_b.end());
  for (std::size_t i = 0; i < ess_a.size(); ++i) s.essential_costs.push_back(std::abs(ess_a[i] - ess_b[i]));
  return s;
}

}  // namespace

double dot_distance(const Dot& u, const Dot& v, double ground_norm) {
  const double db = std::abs(u.birth - v.birth);
  const double dd = std::abs(u.death - v.death);
  if (std::isinf(ground_norm)) return std::max(db, dd);
  return std::pow(std::pow(db, ground_norm) + std::pow(dd, ground_norm), 1.0 / ground_norm);
}

double diagonal_distance(const Dot& u, double ground_norm) {
  const double half = 0.5 * (u.death - u.birth);
  if (std::isinf(ground_norm)) return half;
  return half * std::pow(2.0, 1.0 / ground_norm);
}

double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, const MatchingCost& cost) {
  if (!(cost.p >= 1.0)) throw ArgumentError("Wasserstein exponent p must be >= 1");
  if (std::isinf(cost.p)) return bottleneck(a, b, cost.ground_norm);
  const auto s = split(a, b, cost.ground_norm);
  const double p = cost.p;

  double total = 0.0;
  for (double c : s.essential_costs) total += std::pow(c, p);

  const std::size_t n = s.finite_a.size();
  const std::size_t m = s.finite_b.size();
  if (n + m > 0) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + m), static_cast<Eigen::Index>(n + m));
    for (std::size_t i = 0; i < n; ++i) {
      const double to_diag = std::pow(diagonal_distance(s.finite_a[i], cost.ground_norm), p);
      for (std::size_t j = 0; j < m; ++j)
        c(i, j) = std::pow(dot_distance(s.finite_a[i], s.finite_b[j], cost.ground_norm), p);
      for (std::size_t k = 0; k < n; ++k) c(i, m + k) = to_diag;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double to_diag = std::pow(diagonal_distance(s.finite_b[j], cost.ground_norm), p);
      for (std::size_t l = 0; l < m; ++l) c(n + l, j) = to_diag;
    }
    double assignment = 0.0;
    solve_assignment(c, &assignment);
    total += assignment;
  }
  return std::pow(total, 1.0 / p);
}

double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, double ground_norm) {
  const auto s = split(a, b, ground_norm);
  double essential = 0.0;
  for (double c : s.essential_costs) essential = std::max(essential, c);

  const std::size_t n = s.finite_a.size();
  const std::size_t m = s.finite_b.size();
  if (n + m == 0) return essential;

  Eigen::MatrixXd pair(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<double> diag_a(n), diag_b(m);
  std::vector<double> candidates{0.0};
  for (std::size_t i = 0; i < n; ++i) {
    diag_a[i] = diagonal_distance(s.finite_a[i], ground_norm);
    candidates.push_back(diag_a[i]);
    for (std::size_t j = 0; j < m; ++j) {
      pair(i, j) = dot_distance(s.finite_a[i], s.finite_b[j], ground_norm);
      candidates.push_back(pair(i, j));
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    diag_b[j] = diagonal_distance(s.finite_b[j], ground_norm);
    candidates.push_back(diag_b[j]);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const auto size = static_cast<Eigen::Index>(n + m);
  auto feasible = [&](double delta) {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(size, size);
    allowed.setConstant(false);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) allowed(i, j) = pair(i, j) <= delta;
      if (diag_a[i] <= delta)
        for (std::size_t k = 0; k < n; ++k) allowed(i, m + k) = true;
    }
    for (std::size_t j = 0; j < m; ++j)
      if (diag_b[j] <= delta)
        for (std::size_t l = 0; l < m; ++l) allowed(n + l, j) = true;
    for (std::size_t l = 0; l < m; ++l)
      for (std::size_t k = 0; k < n; ++k) allowed(n + l, m + k) = true;
    return has_perfect_matching(allowed);
  };

  // The largest candidate (every dot to the diagonal) is always feasible.
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return std::max(essential, candidates[lo]);
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw ArgumentError("Hausdorff distance needs non-empty clouds");
  auto directed = [](const PointCloud& from, const PointCloud& to) {
    double worst = 0.0;
    for (const auto& p : from.points) {
      double best = kInfinity;
      for (const auto& q : to.points) best = std::min(best, distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace treeph
