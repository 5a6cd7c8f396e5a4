#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "treeph/diagram.hpp"
#include "treeph/tree.hpp"

namespace treeph {

struct Simplex {
  std::array<std::uint32_t, 3> vertices{};  // ascending; unused slots are 0
  int dimension = 0;
  double scale = 0.0;
};

/// Vietoris-Rips filtration up to dimension 2, radius convention: an edge
/// appears at half its length, a triangle at its longest edge's scale.
/// Simplices are ordered by (scale, dimension, vertex tuple).
struct RipsFiltration {
  std::size_t point_count = 0;
  double max_scale = 0.0;
  std::vector<Simplex> simplices;
};

/// Half the diagonal of the cloud's bounding box (1.0 for a single point).
double default_max_scale(const PointCloud& cloud);

RipsFiltration build_rips(const PointCloud& cloud, double max_scale);

/// Dimension-1 diagram of an explicit filtration by boundary-matrix column
/// reduction over Z/2 with clearing. Cycles alive at max_scale get an
/// infinite death and mark the diagram truncated.
PersistenceDiagram persistence1(const RipsFiltration& filtration);

/// Same diagram as persistence1(build_rips(cloud, max_scale)) without
/// materialising triangles: coboundary reduction over edges in reverse
/// filtration order, with apparent pairs short-circuited. This is the
/// route used for full-size clouds.
PersistenceDiagram rips_persistence1(const PointCloud& cloud, double max_scale);

/// subsample -> Rips -> dimension-1 persistence. `max_scale` defaults to
/// default_max_scale of the sampled cloud.
PersistenceDiagram tree_loops(const EmbeddedTree& tree, std::size_t m, std::optional<double> max_scale,
                              std::uint64_t seed);

}  // namespace treeph
