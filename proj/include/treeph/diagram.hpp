#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

namespace treeph {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One off-diagonal point of a persistence diagram. The diagonal is implicit.
struct Dot {
  double birth = 0.0;
  double death = kInfinity;
  int dimension = 0;

  double persistence() const noexcept { return death - birth; }
  bool essential() const noexcept { return std::isinf(death); }

  friend bool operator==(const Dot&, const Dot&) = default;
};

struct PersistenceDiagram {
  int dimension = 0;
  std::vector<Dot> dots;
  /// Set when the filtration was cut at a finite scale and some class was
  /// still alive there; those classes carry death = infinity.
  std::optional<double> truncated_at;

  bool truncated() const noexcept { return truncated_at.has_value(); }
  std::size_t essential_count() const noexcept;
  /// Dots ordered by (birth, death); handy for comparing multisets.
  std::vector<Dot> sorted_dots() const;
};

/// CSV with header `dim,birth,death`; infinite death written as `inf`.
/// A leading `# truncated at <scale>` comment records truncation.
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram);
PersistenceDiagram read_diagram_csv(std::istream& in);

}  // namespace treeph
