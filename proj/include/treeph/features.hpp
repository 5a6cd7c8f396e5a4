#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "treeph/diagram.hpp"

namespace treeph {

/// Ranks first_rank..last_rank (1-based, inclusive) of the descending-sorted
/// finite persistences of one diagram.
struct FeatureVector {
  std::vector<double> values;
  int first_rank = 1;
  int last_rank = 1;
  int dimension = 0;
};

/// Finite persistences in descending order. Ties are ordered by (birth,
/// death) so the result does not depend on dot storage order.
std::vector<double> sorted_persistences(const PersistenceDiagram& diagram);

/// Window [n, N] of sorted_persistences, zero-padded past the last dot.
/// Essential dots are excluded.
FeatureVector persistence_vector(const PersistenceDiagram& diagram, int n, int N);

/// Rows = subjects. Each column is regressed on `lengths` by ordinary least
/// squares (with intercept); the residuals are returned.
Eigen::MatrixXd residualize(const Eigen::MatrixXd& features, std::span<const double> lengths);
std::vector<double> residualize(std::span<const double> values, std::span<const double> lengths);

enum class LengthExponent { Linear, SquareRoot, CubeRoot };

/// Divides every entry by L, sqrt(L) or cbrt(L).
FeatureVector scale_by_length(FeatureVector features, double length, LengthExponent exponent);
double length_divisor(double length, LengthExponent exponent);

}  // namespace treeph
