#pragma once

#include "treeph/diagram.hpp"
#include "treeph/tree.hpp"

namespace treeph {

/// Outer exponent `p` (>= 1, may be infinite) and the exponent of the planar
/// ground norm used between dots (default l-infinity).
struct MatchingCost {
  double p = 1.0;
  double ground_norm = kInfinity;
};

/// p-Wasserstein distance (sum of cost^p)^(1/p), solved exactly as a square
/// assignment between D plus diagonal slots and D' plus diagonal slots.
/// Essential dots are matched among themselves by sorted birth; differing
/// counts throw InfiniteDistanceError.
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, const MatchingCost& cost = {});

/// Bottleneck distance: binary search over candidate costs with a
/// perfect-matching feasibility test.
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, double ground_norm = kInfinity);

/// Symmetric Hausdorff distance under the Euclidean metric.
double hausdorff(const PointCloud& a, const PointCloud& b);

/// Ground distance between two finite dots and from a dot to the diagonal.
double dot_distance(const Dot& u, const Dot& v, double ground_norm = kInfinity);
double diagonal_distance(const Dot& u, double ground_norm = kInfinity);

}  // namespace treeph
