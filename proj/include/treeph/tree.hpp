#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treeph/geometry.hpp"

namespace treeph {

struct Vertex {
  std::int64_t id = 0;
  Vec3 position;
  std::optional<double> radius;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Edge between two vertices, stored as indices into EmbeddedTree::vertices().
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A vessel tree embedded in R^3 (coordinates in mm).
///
/// Construction validates ids and edge endpoints and derives the branch
/// partition: every edge belongs to exactly one branch, a maximal path whose
/// interior vertices have degree 2. Cycles are tolerated; has_cycle() reports
/// them.
class EmbeddedTree {
public:
  EmbeddedTree() = default;
  EmbeddedTree(std::vector<Vertex> vertices, const std::vector<std::pair<std::int64_t, std::int64_t>>& edges);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  /// Each branch is the ordered list of vertex indices along the path.
  const std::vector<std::vector<std::size_t>>& branches() const noexcept { return branches_; }

  std::size_t index_of(std::int64_t id) const;
  bool has_cycle() const noexcept { return has_cycle_; }
  std::size_t component_count() const noexcept { return components_; }

  friend bool operator==(const EmbeddedTree& a, const EmbeddedTree& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

private:
  void derive_structure();

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> branches_;
  std::vector<std::pair<std::int64_t, std::size_t>> id_index_;  // sorted by id
  bool has_cycle_ = false;
  std::size_t components_ = 0;
};

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

/// Parses the line-oriented tree format (`v <id> <x> <y> <z> [radius]`,
/// `e <id1> <id2>`, `#` comments). Non-fatal findings such as cycles are
/// appended to `warnings` when given.
EmbeddedTree parse_tree(std::istream& in, std::vector<std::string>* warnings = nullptr);
EmbeddedTree read_tree_file(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
void write_tree(std::ostream& out, const EmbeddedTree& tree);

/// Sum of Euclidean edge lengths.
double total_length(const EmbeddedTree& tree);

/// Arc length of every branch, in branch order.
std::vector<double> branch_lengths(const EmbeddedTree& tree);

/// Number of points each branch receives when `m` points are spread over the
/// tree in proportion to branch arc length (at least one per branch).
/// Remainder ties are broken by a permutation drawn from `seed`.
std::vector<std::size_t> allocate_points(const EmbeddedTree& tree, std::size_t m, std::uint64_t seed);

/// Branch-wise subsample with uniform arc-length spacing. Returns all vertex
/// positions when the tree has at most `m` vertices.
PointCloud subsample(const EmbeddedTree& tree, std::size_t m, std::uint64_t seed);

PointCloud read_point_cloud(std::istream& in);
void write_point_cloud(std::ostream& out, const PointCloud& cloud);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace treeph
