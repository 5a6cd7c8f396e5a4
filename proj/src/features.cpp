#include "treeph/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "treeph/error.hpp"

namespace treeph {

std::vector<double> sorted_persistences(const PersistenceDiagram& diagram) {
  std::vector<Dot> finite;
  finite.reserve(diagram.dots.size());
  for (const auto& d : diagram.dots)
    if (!d.essential()) finite.push_back(d);
  std::sort(finite.begin(), finite.end(), [](const Dot& a, const Dot& b) {
    const double pa = a.persistence();
    const double pb = b.persistence();
    if (pa != pb) return pa > pb;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  std::vector<double> out;
  out.reserve(finite.size());
  for (const auto& d : finite) out.push_back(d.persistence());
  return out;
}

FeatureVector persistence_vector(const PersistenceDiagram& diagram, int n, int N) {
  if (n < 1 || N < n) throw ArgumentError("feature window needs 1 <= n <= N");
  const auto pers = sorted_persistences(diagram);
  FeatureVector fv;
  fv.first_rank = n;
  fv.last_rank = N;
  fv.dimension = diagram.dimension;
  fv.values.assign(static_cast<std::size_t>(N - n + 1), 0.0);
  for (int r = n; r <= N && static_cast<std::size_t>(r) <= pers.size(); ++r)
    fv.values[static_cast<std::size_t>(r - n)] = pers[static_cast<std::size_t>(r - 1)];
  return fv;
}

Eigen::MatrixXd residualize(const Eigen::MatrixXd& features, std::span<const double> lengths) {
  const auto n = features.rows();
  if (static_cast<std::size_t>(n) != lengths.size()) throw ArgumentError("one length per subject required");
  if (n < 3) throw ArgumentError("residualize needs at least 3 subjects");

  const Eigen::Map<const Eigen::VectorXd> L(lengths.data(), n);
  const double mean_l = L.mean();
  const Eigen::VectorXd lc = L.array() - mean_l;
  const double sxx = lc.squaredNorm();
  if (!(sxx > 0.0)) throw DegenerateError("total lengths are constant; regression is undefined");

  Eigen::MatrixXd centered = features.rowwise() - features.colwise().mean();
  const Eigen::RowVectorXd slope = (lc.transpose() * centered) / sxx;
  return centered - lc * slope;
}

std::vector<double> residualize(std::span<const double> values, std::span<const double> lengths) {
  const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  const Eigen::MatrixXd r = residualize(Eigen::MatrixXd(v), lengths);
  return {r.data(), r.data() + r.size()};
}

double length_divisor(double length, LengthExponent exponent) {
  if (!(length > 0.0)) throw ArgumentError("total length must be positive");
  switch (exponent) {
    case LengthExponent::Linear:
      return length;
    case LengthExponent::SquareRoot:
      return std::sqrt(length);
    case LengthExponent::CubeRoot:
      return std::cbrt(length);
  }
  return length;
}

FeatureVector scale_by_length(FeatureVector features, double length, LengthExponent exponent) {
  const double divisor = length_divisor(length, exponent);
  for (double& v : features.values) v /= divisor;
  return features;
}

}  // namespace treeph
