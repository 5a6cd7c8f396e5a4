#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "treeph/diagram.hpp"
#include "treeph/geometry.hpp"
#include "treeph/tree.hpp"

namespace treeph {

/// A real-valued function on the vertices of a graph, extended to edges by
/// the max of the endpoint values. Vertices are totally ordered by
/// (value, id), which breaks ties deterministically.
class VertexFiltration {
public:
  VertexFiltration(std::vector<double> values, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                   std::vector<std::int64_t> ids = {});

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::int64_t>& ids() const noexcept { return ids_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }

  double edge_value(std::size_t e) const { return std::max(values_[edges_[e].first], values_[edges_[e].second]); }
  /// True when `a` strictly precedes `b` in the vertex order.
  bool precedes(std::size_t a, std::size_t b) const noexcept {
    return values_[a] != values_[b] ? values_[a] < values_[b] : ids_[a] < ids_[b];
  }
  /// Neighbours of `v` (with multiplicity for parallel edges).
  std::pair<const std::size_t*, const std::size_t*> neighbours(std::size_t v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

private:
  std::vector<double> values_;
  std::vector<std::int64_t> ids_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> adjacency_;
};

/// h(v) = <position(v), direction>. The direction is normalised; a zero
/// vector is rejected.
VertexFiltration height_filtration(const EmbeddedTree& tree, Vec3 direction = {0.0, 0.0, 1.0});

/// Sublevel-set 0-dimensional persistence by a union-find sweep with the
/// elder rule. One essential dot per connected component; zero-persistence
/// pairs (possible only under tied values) are not stored.
PersistenceDiagram persistence0(const VertexFiltration& filtration);

}  // namespace treeph
