#include "treeph/ph0.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "treeph/error.hpp"

namespace treeph {

VertexFiltration::VertexFiltration(std::vector<double> values,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   std::vector<std::int64_t> ids)
    : values_(std::move(values)), ids_(std::move(ids)), edges_(edges) {
  const std::size_t n = values_.size();
  if (ids_.empty()) {
    ids_.resize(n);
    std::iota(ids_.begin(), ids_.end(), std::int64_t{0});
  }
  if (ids_.size() != n) throw ArgumentError("ids and values differ in length");
  for (double v : values_)
    if (!std::isfinite(v)) throw ArgumentError("filtration values must be finite");

  offsets_.assign(n + 1, 0);
  for (auto [a, b] : edges_) {
    if (a >= n || b >= n) throw ArgumentError("edge endpoint out of range");
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (auto [a, b] : edges_) {
    adjacency_[fill[a]++] = b;
    adjacency_[fill[b]++] = a;
  }
}

VertexFiltration height_filtration(const EmbeddedTree& tree, Vec3 direction) {
  const double len = norm(direction);
  if (!(len > 0.0) || !std::isfinite(len)) throw ArgumentError("direction must be a non-zero finite vector");
  if (len != 1.0) direction = (1.0 / len) * direction;

  std::vector<double> values;
  std::vector<std::int64_t> ids;
  values.reserve(tree.vertices().size());
  ids.reserve(tree.vertices().size());
  for (const auto& v : tree.vertices()) {
    values.push_back(dot(v.position, direction));
    ids.push_back(v.id);
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(tree.edges().size());
  for (const auto& e : tree.edges()) edges.emplace_back(e.a, e.b);
  return VertexFiltration(std::move(values), edges, std::move(ids));
}

PersistenceDiagram persistence0(const VertexFiltration& f) {
  const std::size_t n = f.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f.precedes(a, b); });

  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

  // Every root is the oldest vertex of its component, so comparing root
  // ranks implements the elder rule directly.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  PersistenceDiagram diagram;
  diagram.dimension = 0;
  const auto& h = f.values();
  std::vector<std::size_t> roots;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = order[i];
    roots.clear();
    auto [first, last] = f.neighbours(v);
    for (auto it = first; it != last; ++it)
      if (rank[*it] < i) roots.push_back(find(*it));
    if (roots.empty()) continue;  // birth; recorded when the component dies or at the end

    std::sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    const std::size_t survivor = roots.front();
    for (std::size_t k = 1; k < roots.size(); ++k) {
      const std::size_t dying = roots[k];
      if (h[v] > h[dying]) diagram.dots.push_back({h[dying], h[v], 0});
      parent[dying] = survivor;
    }
    parent[v] = survivor;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = order[i];
    if (find(v) == v) diagram.dots.push_back({h[v], kInfinity, 0});
  }
  return diagram;
}

}  // namespace treeph
