#pragma once

// Vietoris-Rips persistent homology.
//
// Simplices are identified by their index in the combinatorial number system:
// a simplex with ascending vertices u_0 < u_1 < ... < u_d has index
// sum_k C(u_k, k + 1). Within one dimension the filtration order is
// (diameter, index); ordering by index is the lexicographic order of the
// descending vertex tuples. Faces always precede cofaces because a coface has
// an equal or larger diameter and a higher dimension.
//
// Persistence pairs are obtained by reducing the coboundary matrix one
// dimension at a time, dimension 0 upwards. Columns are processed in reverse
// filtration order and the pivot of a column is its earliest coface. A
// (d+1)-simplex that became a pivot in dimension d is dropped from the
// dimension d+1 columns ("clearing"): its column would reduce to zero.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "argutopo/detail/numfmt.hpp"
#include "argutopo/error.hpp"
#include "argutopo/signal.hpp"

namespace argutopo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Symmetric, non-negative, zero-diagonal n x n matrix. Off-diagonal zeros are
/// legal: duplicate points occur whenever a text repeats a word pattern.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  /// Validates and adopts a row-major n x n matrix.
  DistanceMatrix(std::size_t n, std::vector<double> entries) : n_(n), d_(std::move(entries)) {
    if (d_.size() != n_ * n_) throw DataError("distance matrix storage must be n*n");
    for (std::size_t i = 0; i < n_; ++i) {
      if (d_[i * n_ + i] != 0.0) throw DataError("distance matrix diagonal must be zero");
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double a = d_[i * n_ + j];
        if (!std::isfinite(a) || a < 0.0) {
          throw DataError("distance matrix entries must be finite and non-negative");
        }
        if (a != d_[j * n_ + i]) throw DataError("distance matrix must be symmetric");
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

  [[nodiscard]] double max_distance() const {
    return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Euclidean distances; each pair is computed once and mirrored.
inline DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = cloud.point(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto q = cloud.point(j);
      double s = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
      d[i * n + j] = d[j * n + i] = std::sqrt(s);
    }
  }
  return DistanceMatrix(n, std::move(d));
}

struct PersistencePoint {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;

  [[nodiscard]] bool essential() const noexcept { return std::isinf(death); }
  [[nodiscard]] double persistence() const noexcept { return death - birth; }

  friend bool operator==(const PersistencePoint&, const PersistencePoint&) = default;
  friend std::partial_ordering operator<=>(const PersistencePoint& a, const PersistencePoint& b) {
    if (a.dim != b.dim) return a.dim <=> b.dim;
    if (a.birth != b.birth) return a.birth <=> b.birth;
    return a.death <=> b.death;
  }
};

struct PersistenceDiagram {
  int max_dim = 1;
  /// Sorted by (dim, birth, death).
  std::vector<PersistencePoint> points;
  std::map<std::string, std::string> metadata;

  [[nodiscard]] std::vector<PersistencePoint> in_dimension(int dim) const {
    std::vector<PersistencePoint> out;
    std::copy_if(points.begin(), points.end(), std::back_inserter(out),
                 [dim](const PersistencePoint& p) { return p.dim == dim; });
    return out;
  }

  void canonicalize() { std::sort(points.begin(), points.end()); }
};

namespace detail {

class BinomialTable {
 public:
  BinomialTable(std::size_t max_n, std::size_t max_k) : max_k_(max_k), table_((max_n + 1) * (max_k + 1), 0) {
    for (std::size_t n = 0; n <= max_n; ++n) {
      at(n, 0) = 1;
      for (std::size_t k = 1; k <= std::min(n, max_k); ++k) {
        at(n, k) = (k == n) ? 1 : at(n - 1, k - 1) + at(n - 1, k);
      }
    }
  }

  [[nodiscard]] std::uint64_t operator()(std::size_t n, std::size_t k) const {
    return table_[n * (max_k_ + 1) + k];
  }

 private:
  std::uint64_t& at(std::size_t n, std::size_t k) { return table_[n * (max_k_ + 1) + k]; }

  std::size_t max_k_;
  std::vector<std::uint64_t> table_;
};

struct Simplex {
  double diameter;
  std::uint64_t index;
};

/// Filtration order within one dimension.
inline bool filtration_less(const Simplex& a, const Simplex& b) {
  return a.diameter < b.diameter || (a.diameter == b.diameter && a.index < b.index);
}

struct LaterInFiltration {
  bool operator()(const Simplex& a, const Simplex& b) const { return filtration_less(b, a); }
};

class RipsComplex {
 public:
  RipsComplex(const DistanceMatrix& d, std::size_t max_simplex_dim, double max_radius)
      : d_(d), binom_(d.size(), max_simplex_dim + 2), max_radius_(max_radius) {}

  [[nodiscard]] std::size_t vertex_count() const noexcept { return d_.size(); }
  [[nodiscard]] double max_radius() const noexcept { return max_radius_; }

  /// Ascending vertices of the `dim`-simplex with the given index.
  void vertices(std::uint64_t index, std::size_t dim, std::vector<std::size_t>& out) const {
    out.resize(dim + 1);
    std::size_t upper = d_.size();
    for (std::size_t k = dim + 1; k-- > 0;) {
      // Largest v < upper with C(v, k + 1) <= index.
      std::size_t lo = k;
      std::size_t hi = upper - 1;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (binom_(mid, k + 1) <= index) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      out[k] = lo;
      index -= binom_(lo, k + 1);
      upper = lo;
    }
  }

  [[nodiscard]] double diameter(const std::vector<std::size_t>& verts) const {
    double diam = 0.0;
    for (std::size_t a = 0; a < verts.size(); ++a) {
      for (std::size_t b = a + 1; b < verts.size(); ++b) diam = std::max(diam, d_(verts[a], verts[b]));
    }
    return diam;
  }

  [[nodiscard]] std::uint64_t simplex_count(std::size_t dim) const {
    return binom_(d_.size(), dim + 1);
  }

  /// Appends every coface of `s` (a `dim`-simplex) that enters the filtration
  /// at or below the radius cutoff.
  template <typename Sink>
  void for_each_coface(const Simplex& s, std::size_t dim, std::vector<std::size_t>& scratch,
                       Sink&& sink) const {
    vertices(s.index, dim, scratch);
    // Inserting w between the vertices below and above it: the lower ones keep
    // their slot, the upper ones move up one slot.
    std::uint64_t prefix = 0;
    std::uint64_t shifted_suffix = 0;
    for (std::size_t k = 0; k <= dim; ++k) shifted_suffix += binom_(scratch[k], k + 2);

    std::size_t next = 0;  // number of vertices smaller than w
    for (std::size_t w = 0; w < d_.size(); ++w) {
      if (next <= dim && scratch[next] == w) {
        prefix += binom_(w, next + 1);
        shifted_suffix -= binom_(w, next + 2);
        ++next;
        continue;
      }
      double diam = s.diameter;
      for (std::size_t k = 0; k <= dim; ++k) diam = std::max(diam, d_(w, scratch[k]));
      if (diam > max_radius_) continue;
      sink(Simplex{diam, prefix + binom_(w, next + 1) + shifted_suffix});
    }
  }

 private:
  const DistanceMatrix& d_;
  BinomialTable binom_;
  double max_radius_;
};

using CofaceHeap = std::priority_queue<Simplex, std::vector<Simplex>, LaterInFiltration>;

/// Pops the earliest coface that survives Z/2 cancellation.
inline std::optional<Simplex> pop_pivot(CofaceHeap& heap) {
  while (!heap.empty()) {
    const Simplex top = heap.top();
    heap.pop();
    if (!heap.empty() && heap.top().index == top.index) {
      heap.pop();
      continue;
    }
    return top;
  }
  return std::nullopt;
}

/// Sorts and cancels repeated simplices (coefficients mod 2).
inline void canonicalize_chain(std::vector<Simplex>& chain) {
  std::sort(chain.begin(), chain.end(),
            [](const Simplex& a, const Simplex& b) { return a.index < b.index; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < chain.size();) {
    if (i + 1 < chain.size() && chain[i + 1].index == chain[i].index) {
      i += 2;
    } else {
      chain[out++] = chain[i++];
    }
  }
  chain.resize(out);
}

/// Reduces the coboundary columns of `columns` (all `dim`-simplices still to
/// process). Emits dimension-`dim` persistence points and returns the set of
/// (dim+1)-simplices that were paired.
inline std::unordered_set<std::uint64_t> reduce_dimension(const RipsComplex& complex,
                                                          std::size_t dim,
                                                          std::vector<Simplex> columns,
                                                          std::vector<PersistencePoint>& out) {
  std::sort(columns.begin(), columns.end(), LaterInFiltration{});

  std::unordered_map<std::uint64_t, std::size_t> pivot_column;
  std::vector<std::vector<Simplex>> reductions;
  std::unordered_set<std::uint64_t> paired;
  pivot_column.reserve(columns.size());

  std::vector<std::size_t> scratch;
  std::vector<Simplex> heap_storage;
  std::vector<Simplex> working;

  for (const Simplex& column : columns) {
    heap_storage.clear();
    complex.for_each_coface(column, dim, scratch,
                            [&](const Simplex& c) { heap_storage.push_back(c); });
    CofaceHeap heap(LaterInFiltration{}, std::move(heap_storage));
    heap_storage = {};
    working.assign(1, column);

    for (;;) {
      const auto pivot = pop_pivot(heap);
      if (!pivot) {
        out.push_back({static_cast<int>(dim), column.diameter, kInfinity});
        break;
      }
      const auto it = pivot_column.find(pivot->index);
      if (it == pivot_column.end()) {
        canonicalize_chain(working);
        pivot_column.emplace(pivot->index, reductions.size());
        reductions.push_back(working);
        paired.insert(pivot->index);
        if (pivot->diameter > column.diameter) {
          out.push_back({static_cast<int>(dim), column.diameter, pivot->diameter});
        }
        break;
      }
      heap.push(*pivot);
      for (const Simplex& s : reductions[it->second]) {
        working.push_back(s);
        complex.for_each_coface(s, dim, scratch, [&](const Simplex& c) { heap.push(c); });
      }
    }
  }
  return paired;
}

}  // namespace detail

struct RipsOptions {
  int max_dim = 1;
  double max_radius = kInfinity;
};

/// Persistence diagram of the Vietoris-Rips filtration in dimensions
/// 0..max_dim. Zero-persistence pairs are omitted; classes still alive at
/// `max_radius` get an infinite death.
inline PersistenceDiagram rips_persistence(const DistanceMatrix& distances,
                                           const RipsOptions& options = {}) {
  if (distances.size() == 0) throw NumericalError("persistence of an empty point cloud");
  if (options.max_dim < 1 || options.max_dim > 2) {
    throw UsageError("max homology dimension must be 1 or 2");
  }
  if (std::isnan(options.max_radius) || options.max_radius < 0.0) {
    throw UsageError("max radius must be non-negative");
  }
  const auto top = static_cast<std::size_t>(options.max_dim);
  const detail::RipsComplex complex(distances, top, options.max_radius);

  PersistenceDiagram diagram;
  diagram.max_dim = options.max_dim;

  std::vector<detail::Simplex> columns;
  columns.reserve(distances.size());
  for (std::size_t v = 0; v < distances.size(); ++v) columns.push_back({0.0, v});

  std::vector<std::size_t> verts;
  for (std::size_t dim = 0; dim <= top; ++dim) {
    const auto paired = detail::reduce_dimension(complex, dim, std::move(columns), diagram.points);
    if (dim == top) break;
    columns.clear();
    const std::uint64_t count = complex.simplex_count(dim + 1);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      if (paired.count(idx)) continue;
      complex.vertices(idx, dim + 1, verts);
      const double diam = complex.diameter(verts);
      if (diam <= options.max_radius) columns.push_back({diam, idx});
    }
  }
  diagram.canonicalize();
  diagram.metadata["complex"] = "vietoris-rips";
  diagram.metadata["max_radius"] =
      std::isinf(options.max_radius) ? "inf" : detail::format_shortest(options.max_radius);
  diagram.metadata["points"] = std::to_string(distances.size());
  return diagram;
}

/// Dimension-0 diagram from Kruskal's algorithm: one (0, edge) pair per merge
/// with a positive edge length and one (0, inf) class per component.
inline PersistenceDiagram h0_persistence(const DistanceMatrix& distances) {
  const std::size_t n = distances.size();
  if (n == 0) throw NumericalError("persistence of an empty point cloud");

  struct Edge {
    double length;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({distances(i, j), i, j});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.length < b.length || (a.length == b.length && std::tie(a.j, a.i) < std::tie(b.j, b.i));
  });

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  PersistenceDiagram diagram;
  diagram.max_dim = 0;
  std::size_t components = n;
  for (const Edge& e : edges) {
    const std::size_t a = find(e.i);
    const std::size_t b = find(e.j);
    if (a == b) continue;
    parent[std::max(a, b)] = std::min(a, b);
    --components;
    if (e.length > 0.0) diagram.points.push_back({0, 0.0, e.length});
    if (components == 1) break;
  }
  for (std::size_t c = 0; c < components; ++c) diagram.points.push_back({0, 0.0, kInfinity});
  diagram.canonicalize();
  diagram.metadata["complex"] = "vietoris-rips";
  diagram.metadata["points"] = std::to_string(n);
  return diagram;
}

}  // namespace argutopo
