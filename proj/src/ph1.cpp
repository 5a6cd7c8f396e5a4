#include "treeph/ph1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "treeph/error.hpp"

namespace treeph {

namespace {

class DistanceMatrix {
public:
  explicit DistanceMatrix(const PointCloud& cloud) : n_(cloud.size()), d_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double v = distance(cloud.points[i], cloud.points[j]);
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
      }
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
  std::size_t size() const noexcept { return n_; }

private:
  std::size_t n_;
  std::vector<double> d_;
};

void check_inputs(const PointCloud& cloud, double max_scale) {
  if (cloud.empty()) throw ArgumentError("point cloud is empty");
  if (!(max_scale > 0.0)) throw ArgumentError("max_scale must be positive");
  if (cloud.size() >= (std::size_t{1} << 21)) throw ArgumentError("point cloud too large");
}

bool simplex_less(const Simplex& a, const Simplex& b) {
  if (a.scale != b.scale) return a.scale < b.scale;
  if (a.dimension != b.dimension) return a.dimension < b.dimension;
  return a.vertices < b.vertices;
}

using Column = std::vector<std::size_t>;  // ascending row indices

void add_column(Column& target, const Column& source, Column& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

void mark_truncated(PersistenceDiagram& diagram, double max_scale) {
  if (diagram.essential_count() > 0) diagram.truncated_at = max_scale;
}

}  // namespace

double default_max_scale(const PointCloud& cloud) {
  if (cloud.empty()) throw ArgumentError("point cloud is empty");
  Vec3 lo = cloud.points.front();
  Vec3 hi = lo;
  for (const auto& p : cloud.points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double half = 0.5 * distance(lo, hi);
  return half > 0.0 ? half : 1.0;
}

RipsFiltration build_rips(const PointCloud& cloud, double max_scale) {
  check_inputs(cloud, max_scale);
  const std::size_t n = cloud.size();
  const DistanceMatrix d(cloud);
  auto present = [&](std::size_t i, std::size_t j) { return d(i, j) / 2.0 <= max_scale; };

  RipsFiltration f;
  f.point_count = n;
  f.max_scale = max_scale;
  for (std::uint32_t i = 0; i < n; ++i) f.simplices.push_back({{i, 0, 0}, 0, 0.0});
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (!present(i, j)) continue;
      f.simplices.push_back({{i, j, 0}, 1, d(i, j) / 2.0});
      for (std::uint32_t k = j + 1; k < n; ++k)
        if (present(i, k) && present(j, k))
          f.simplices.push_back({{i, j, k}, 2, std::max({d(i, j), d(i, k), d(j, k)}) / 2.0});
    }
  std::sort(f.simplices.begin(), f.simplices.end(), simplex_less);
  return f;
}

PersistenceDiagram persistence1(const RipsFiltration& f) {
  const std::size_t n = f.point_count;
  const auto& s = f.simplices;
  const std::size_t none = std::numeric_limits<std::size_t>::max();

  std::unordered_map<std::uint64_t, std::size_t> edge_index;
  auto edge_key = [n](std::uint64_t a, std::uint64_t b) { return a * n + b; };
  std::vector<std::size_t> vertex_index(n, none);
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    if (s[idx].dimension == 0) vertex_index[s[idx].vertices[0]] = idx;
    if (s[idx].dimension == 1) edge_index[edge_key(s[idx].vertices[0], s[idx].vertices[1])] = idx;
  }

  auto boundary = [&](std::size_t idx) {
    const auto& v = s[idx].vertices;
    Column c;
    if (s[idx].dimension == 1) {
      c = {vertex_index[v[0]], vertex_index[v[1]]};
    } else if (s[idx].dimension == 2) {
      c = {edge_index.at(edge_key(v[0], v[1])), edge_index.at(edge_key(v[0], v[2])),
           edge_index.at(edge_key(v[1], v[2]))};
    }
    std::sort(c.begin(), c.end());
    return c;
  };

  PersistenceDiagram diagram;
  diagram.dimension = 1;
  std::vector<bool> cleared(s.size(), false);
  std::vector<bool> killed(s.size(), false);
  std::vector<bool> positive(s.size(), false);
  Column scratch;

  // Highest dimension first so that pivots clear the columns they index.
  for (int dim = 2; dim >= 1; --dim) {
    std::unordered_map<std::size_t, Column> reduced;  // pivot row -> reduced column
    for (std::size_t idx = 0; idx < s.size(); ++idx) {
      if (s[idx].dimension != dim) continue;
      if (cleared[idx]) {
        positive[idx] = true;
        continue;
      }
      Column col = boundary(idx);
      while (!col.empty()) {
        auto it = reduced.find(col.back());
        if (it == reduced.end()) break;
        add_column(col, it->second, scratch);
      }
      if (col.empty()) {
        positive[idx] = true;
        continue;
      }
      const std::size_t low = col.back();
      cleared[low] = true;
      killed[low] = true;
      if (dim == 2 && s[idx].scale > s[low].scale) diagram.dots.push_back({s[low].scale, s[idx].scale, 1});
      reduced.emplace(low, std::move(col));
    }
  }

  // A positive edge (zero column after reduction, or cleared) opens a
  // cycle; the ones no triangle killed survive to max_scale.
  for (std::size_t idx = 0; idx < s.size(); ++idx)
    if (s[idx].dimension == 1 && positive[idx] && !killed[idx])
      diagram.dots.push_back({s[idx].scale, kInfinity, 1});
  mark_truncated(diagram, f.max_scale);
  return diagram;
}

PersistenceDiagram rips_persistence1(const PointCloud& cloud, double max_scale) {
  check_inputs(cloud, max_scale);
  const std::size_t n = cloud.size();
  const DistanceMatrix d(cloud);
  const double cap = 2.0 * max_scale;

  struct EdgeRec {
    double diam;
    std::uint32_t i, j;
  };
  std::vector<EdgeRec> edges;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (d(i, j) <= cap) edges.push_back({d(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [](const EdgeRec& a, const EdgeRec& b) {
    if (a.diam != b.diam) return a.diam < b.diam;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  // Edges that merge components pair with vertices; their coboundary
  // columns are cleared.
  std::vector<bool> cleared(edges.size(), false);
  {
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto a = find(edges[e].i);
      const auto b = find(edges[e].j);
      if (a != b) {
        parent[std::max(a, b)] = std::min(a, b);
        cleared[e] = true;
      }
    }
  }

  const std::uint64_t nn = n;
  struct Entry {
    double diam;
    std::uint64_t code;  // lexicographic code a*n^2 + b*n + c, a < b < c
    bool operator==(const Entry& o) const { return diam == o.diam && code == o.code; }
    bool operator>(const Entry& o) const { return diam != o.diam ? diam > o.diam : code > o.code; }
  };
  auto tri_code = [nn](std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (a * nn + b) * nn + c;
  };
  auto edge_less = [](double da, std::uint64_t ca, double db, std::uint64_t cb) {
    return da != db ? da < db : ca < cb;
  };

  using Heap = std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>>;
  auto push_coboundary = [&](Heap& heap, const EdgeRec& e) {
    for (std::uint32_t k = 0; k < n; ++k) {
      if (k == e.i || k == e.j) continue;
      const double dik = d(e.i, k);
      const double djk = d(e.j, k);
      if (dik > cap || djk > cap) continue;
      heap.push({std::max({e.diam, dik, djk}), tri_code(e.i, e.j, k)});
    }
  };
  auto pop_pivot = [](Heap& heap) -> std::optional<Entry> {
    while (!heap.empty()) {
      Entry top = heap.top();
      heap.pop();
      if (!heap.empty() && heap.top() == top) {
        heap.pop();
        continue;
      }
      heap.push(top);
      return top;
    }
    return std::nullopt;
  };

  PersistenceDiagram diagram;
  diagram.dimension = 1;
  std::unordered_map<std::uint64_t, std::uint32_t> pivot_owner;  // triangle code -> edge index
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> combination;  // nontrivial V columns

  for (std::size_t pos = edges.size(); pos-- > 0;) {
    if (cleared[pos]) continue;
    const EdgeRec& e = edges[pos];
    const std::uint64_t e_code = std::uint64_t{e.i} * nn + e.j;

    // Apparent pair: the earliest coface has the edge's own diameter and the
    // edge is that triangle's latest facet.
    {
      std::uint32_t k_hit = static_cast<std::uint32_t>(n);
      for (std::uint32_t k = 0; k < n; ++k) {
        if (k == e.i || k == e.j) continue;
        if (d(e.i, k) <= e.diam && d(e.j, k) <= e.diam) {
          k_hit = k;
          break;
        }
      }
      if (k_hit < n) {
        const std::uint32_t k = k_hit;
        auto facet_code = [nn](std::uint64_t a, std::uint64_t b) { return std::min(a, b) * nn + std::max(a, b); };
        const bool latest = edge_less(d(e.i, k), facet_code(e.i, k), e.diam, e_code) &&
                            edge_less(d(e.j, k), facet_code(e.j, k), e.diam, e_code);
        const std::uint64_t code = tri_code(e.i, e.j, k);
        if (latest && !pivot_owner.count(code)) {
          pivot_owner.emplace(code, static_cast<std::uint32_t>(pos));
          continue;  // zero persistence
        }
      }
    }

    Heap heap;
    push_coboundary(heap, e);
    std::vector<std::uint32_t> used{static_cast<std::uint32_t>(pos)};
    for (;;) {
      auto pivot = pop_pivot(heap);
      if (!pivot) {
        diagram.dots.push_back({e.diam / 2.0, kInfinity, 1});
        break;
      }
      auto owner = pivot_owner.find(pivot->code);
      if (owner == pivot_owner.end()) {
        pivot_owner.emplace(pivot->code, static_cast<std::uint32_t>(pos));
        if (pivot->diam > e.diam) diagram.dots.push_back({e.diam / 2.0, pivot->diam / 2.0, 1});
        std::sort(used.begin(), used.end());
        std::vector<std::uint32_t> reduced;
        for (std::size_t a = 0; a < used.size();) {
          std::size_t b = a;
          while (b < used.size() && used[b] == used[a]) ++b;
          if ((b - a) % 2 == 1) reduced.push_back(used[a]);
          a = b;
        }
        if (!(reduced.size() == 1 && reduced[0] == pos)) combination.emplace(static_cast<std::uint32_t>(pos), std::move(reduced));
        break;
      }
      const std::uint32_t other = owner->second;
      auto comb = combination.find(other);
      if (comb == combination.end()) {
        push_coboundary(heap, edges[other]);
        used.push_back(other);
      } else {
        for (std::uint32_t f : comb->second) {
          push_coboundary(heap, edges[f]);
          used.push_back(f);
        }
      }
    }
  }
  mark_truncated(diagram, max_scale);
  return diagram;
}

PersistenceDiagram tree_loops(const EmbeddedTree& tree, std::size_t m, std::optional<double> max_scale,
                              std::uint64_t seed) {
  const PointCloud cloud = subsample(tree, m, seed);
  const double scale = max_scale ? *max_scale : default_max_scale(cloud);
  return rips_persistence1(cloud, scale);
}

}  // namespace treeph
