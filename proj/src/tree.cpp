#include "treeph/tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>

#include "treeph/error.hpp"

namespace treeph {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

double edge_length(const EmbeddedTree& tree, const Edge& e) {
  return distance(tree.vertices()[e.a].position, tree.vertices()[e.b].position);
}

double path_length(const EmbeddedTree& tree, const std::vector<std::size_t>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i)
    len += distance(tree.vertices()[path[i - 1]].position, tree.vertices()[path[i]].position);
  return len;
}

Vec3 point_at_arc_length(const EmbeddedTree& tree, const std::vector<std::size_t>& path, double t) {
  const auto& v = tree.vertices();
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec3 a = v[path[i - 1]].position;
    const Vec3 b = v[path[i]].position;
    const double seg = distance(a, b);
    if (t <= seg || i + 1 == path.size()) {
      if (seg == 0.0) return a;
      const double u = std::clamp(t / seg, 0.0, 1.0);
      return a + u * (b - a);
    }
    t -= seg;
  }
  return v[path.front()].position;
}

}  // namespace

EmbeddedTree::EmbeddedTree(std::vector<Vertex> vertices,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& edges)
    : vertices_(std::move(vertices)) {
  id_index_.reserve(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id < 0) throw ArgumentError("vertex ids must be non-negative");
    id_index_.emplace_back(vertices_[i].id, i);
  }
  std::sort(id_index_.begin(), id_index_.end());
  for (std::size_t i = 1; i < id_index_.size(); ++i)
    if (id_index_[i].first == id_index_[i - 1].first)
      throw DuplicateError("duplicate vertex id " + std::to_string(id_index_[i].first));

  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a == b) throw ArgumentError("self-loop at vertex " + std::to_string(a));
    edges_.push_back({index_of(a), index_of(b)});
  }
  derive_structure();
}

std::size_t EmbeddedTree::index_of(std::int64_t id) const {
  auto it = std::lower_bound(id_index_.begin(), id_index_.end(), std::make_pair(id, std::size_t{0}));
  if (it == id_index_.end() || it->first != id)
    throw ReferenceError("undefined vertex id " + std::to_string(id));
  return it->second;
}

void EmbeddedTree::derive_structure() {
  const std::size_t n = vertices_.size();
  std::vector<std::vector<std::size_t>> incident(n);  // edge indices
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    incident[edges_[e].a].push_back(e);
    incident[edges_[e].b].push_back(e);
  }

  DisjointSet ds(n);
  components_ = n;
  has_cycle_ = false;
  for (const auto& e : edges_) {
    if (ds.unite(e.a, e.b))
      --components_;
    else
      has_cycle_ = true;
  }

  branches_.clear();
  std::vector<bool> used(edges_.size(), false);
  auto other = [&](std::size_t e, std::size_t v) { return edges_[e].a == v ? edges_[e].b : edges_[e].a; };
  auto walk = [&](std::size_t start, std::size_t first_edge) {
    std::vector<std::size_t> path{start};
    std::size_t e = first_edge;
    std::size_t v = start;
    for (;;) {
      used[e] = true;
      v = other(e, v);
      path.push_back(v);
      if (incident[v].size() != 2) break;
      const std::size_t next = incident[v][0] == e ? incident[v][1] : incident[v][0];
      if (used[next]) break;
      e = next;
    }
    branches_.push_back(std::move(path));
  };

  for (std::size_t v = 0; v < n; ++v) {
    if (incident[v].size() == 2) continue;
    for (std::size_t e : incident[v])
      if (!used[e]) walk(v, e);
  }
  // Whatever remains lies on cycles made only of degree-2 vertices.
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (!used[e]) walk(edges_[e].a, e);
}

EmbeddedTree parse_tree(std::istream& in, std::vector<std::string>* warnings) {
  std::vector<Vertex> vertices;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  std::vector<std::size_t> edge_lines;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tok = tokenize(view);
    if (tok.empty()) continue;

    if (tok[0] == "v") {
      if (tok.size() != 5 && tok.size() != 6) throw ParseError(line_no, "vertex record needs 4 or 5 fields");
      Vertex v;
      if (!parse_number(tok[1], v.id) || v.id < 0) throw ParseError(line_no, "bad vertex id");
      if (!parse_number(tok[2], v.position.x) || !parse_number(tok[3], v.position.y) ||
          !parse_number(tok[4], v.position.z))
        throw ParseError(line_no, "bad coordinate");
      if (!std::isfinite(v.position.x) || !std::isfinite(v.position.y) || !std::isfinite(v.position.z))
        throw ParseError(line_no, "non-finite coordinate");
      if (tok.size() == 6) {
        double r = 0.0;
        if (!parse_number(tok[5], r) || !std::isfinite(r) || r < 0.0) throw ParseError(line_no, "bad radius");
        v.radius = r;
      }
      vertices.push_back(v);
    } else if (tok[0] == "e") {
      if (tok.size() != 3) throw ParseError(line_no, "edge record needs 2 fields");
      std::int64_t a = 0;
      std::int64_t b = 0;
      if (!parse_number(tok[1], a) || !parse_number(tok[2], b) || a < 0 || b < 0)
        throw ParseError(line_no, "bad edge endpoint");
      if (a == b) throw ParseError(line_no, "self-loop");
      edges.emplace_back(a, b);
      edge_lines.push_back(line_no);
    } else {
      throw ParseError(line_no, "unknown record type '" + std::string(tok[0]) + "'");
    }
  }

  // Validate references here so the error can name the offending line.
  std::vector<std::int64_t> ids;
  ids.reserve(vertices.size());
  for (const auto& v : vertices) ids.push_back(v.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] == ids[i - 1]) throw DuplicateError("duplicate vertex id " + std::to_string(ids[i]));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (auto id : {edges[i].first, edges[i].second})
      if (!std::binary_search(ids.begin(), ids.end(), id))
        throw ReferenceError("line " + std::to_string(edge_lines[i]) + ": undefined vertex id " +
                             std::to_string(id));
  }

  EmbeddedTree tree(std::move(vertices), edges);
  if (warnings) {
    if (tree.has_cycle()) warnings->push_back("edge set contains a cycle");
  }
  return tree;
}

EmbeddedTree read_tree_file(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file " + path.string());
  return parse_tree(in, warnings);
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_tree(std::ostream& out, const EmbeddedTree& tree) {
  for (const auto& v : tree.vertices()) {
    out << "v " << v.id << ' ' << format_double(v.position.x) << ' ' << format_double(v.position.y) << ' '
        << format_double(v.position.z);
    if (v.radius) out << ' ' << format_double(*v.radius);
    out << '\n';
  }
  for (const auto& e : tree.edges())
    out << "e " << tree.vertices()[e.a].id << ' ' << tree.vertices()[e.b].id << '\n';
}

double total_length(const EmbeddedTree& tree) {
  double len = 0.0;
  for (const auto& e : tree.edges()) len += edge_length(tree, e);
  return len;
}

std::vector<double> branch_lengths(const EmbeddedTree& tree) {
  std::vector<double> out;
  out.reserve(tree.branches().size());
  for (const auto& b : tree.branches()) out.push_back(path_length(tree, b));
  return out;
}

std::vector<std::size_t> allocate_points(const EmbeddedTree& tree, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw ArgumentError("subsample size must be at least 1");
  const auto lengths = branch_lengths(tree);
  const std::size_t nb = lengths.size();
  if (nb == 0) return {};
  if (nb >= m) return std::vector<std::size_t>(nb, 1);

  double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  std::vector<double> quota(nb);
  for (std::size_t b = 0; b < nb; ++b)
    quota[b] = total > 0.0 ? static_cast<double>(m) * lengths[b] / total : static_cast<double>(m) / nb;

  std::vector<std::size_t> alloc(nb);
  std::size_t assigned = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    alloc[b] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(quota[b])));
    assigned += alloc[b];
  }

  // Seeded order decides between equal remainders.
  std::vector<std::size_t> order(nb);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto remainder = [&](std::size_t b) { return quota[b] - static_cast<double>(alloc[b]); };

  while (assigned < m) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder(a) > remainder(b); });
    for (std::size_t b : order) {
      if (assigned == m) break;
      ++alloc[b];
      ++assigned;
    }
  }
  while (assigned > m) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder(a) < remainder(b); });
    for (std::size_t b : order) {
      if (assigned == m) break;
      if (alloc[b] > 1) {
        --alloc[b];
        --assigned;
      }
    }
  }
  return alloc;
}

PointCloud subsample(const EmbeddedTree& tree, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw ArgumentError("subsample size must be at least 1");
  PointCloud cloud;
  if (tree.vertices().size() <= m) {
    cloud.points.reserve(tree.vertices().size());
    for (const auto& v : tree.vertices()) cloud.points.push_back(v.position);
    return cloud;
  }

  const auto alloc = allocate_points(tree, m, seed);
  const auto& branches = tree.branches();
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const double len = path_length(tree, branches[b]);
    const std::size_t k = alloc[b];
    if (k == 1) {
      cloud.points.push_back(point_at_arc_length(tree, branches[b], 0.5 * len));
      continue;
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double t = len * static_cast<double>(j) / static_cast<double>(k - 1);
      cloud.points.push_back(point_at_arc_length(tree, branches[b], t));
    }
  }
  return cloud;
}

PointCloud read_point_cloud(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tok = tokenize(view);
    if (tok.empty()) continue;
    Vec3 p;
    if (tok.size() != 3 || !parse_number(tok[0], p.x) || !parse_number(tok[1], p.y) || !parse_number(tok[2], p.z))
      throw ParseError(line_no, "expected 'x y z'");
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw ParseError(line_no, "non-finite coordinate");
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_point_cloud(std::ostream& out, const PointCloud& cloud) {
  for (const auto& p : cloud.points)
    out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
}

}  // namespace treeph
