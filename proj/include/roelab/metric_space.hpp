#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "roelab/errors.hpp"
#include "roelab/index_set.hpp"

namespace roelab {

using Point = std::size_t;
using Edge = std::pair<Point, Point>;

/// Finite metric space on points {0, ..., n-1}. Immutable after construction.
///
/// Graph metrics are computed by BFS with unit edge lengths, so every distance
/// is an exact small integer stored in a double.
class MetricSpace {
 public:
  /// Builds a space from a dense row-major distance table and checks the
  /// metric axioms exhaustively.
  static MetricSpace from_distances(std::string label, std::size_t n, std::vector<double> dist) {
    if (n == 0) throw DomainError("MetricSpace: empty space");
    if (dist.size() != n * n) {
      throw DomainError("MetricSpace: distance table has " + std::to_string(dist.size()) +
                        " entries, expected " + std::to_string(n * n));
    }
    MetricSpace s(std::move(label), n, std::move(dist));
    s.validate();
    return s;
  }

  /// Shortest-path metric of an undirected graph. Throws if disconnected.
  static MetricSpace from_edges(std::string label, std::size_t n, const std::vector<Edge>& edges) {
    if (n == 0) throw DomainError("MetricSpace: empty space");
    std::vector<std::vector<Point>> adj(n);
    for (auto [i, j] : edges) {
      if (i >= n || j >= n) throw DomainError("MetricSpace: edge endpoint out of range");
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
    for (auto& nb : adj) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    std::vector<double> dist(n * n, -1.0);
    std::vector<Point> queue;
    queue.reserve(n);
    for (Point src = 0; src < n; ++src) {
      double* row = dist.data() + src * n;
      row[src] = 0.0;
      queue.clear();
      queue.push_back(src);
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const Point u = queue[head];
        for (Point v : adj[u]) {
          if (row[v] < 0.0) {
            row[v] = row[u] + 1.0;
            queue.push_back(v);
          }
        }
      }
      if (queue.size() != n) throw DomainError("MetricSpace: graph '" + label + "' is disconnected");
    }
    return MetricSpace(std::move(label), n, std::move(dist));
  }

  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return n_; }

  double dist(Point x, Point y) const {
    check_point(x);
    check_point(y);
    return dist_[x * n_ + y];
  }

  /// Row-major n*n table.
  const std::vector<double>& distances() const noexcept { return dist_; }

  /// Sorted distinct distance values, including 0.
  const std::vector<double>& realized_distances() const noexcept { return realized_; }

  double diameter() const noexcept { return realized_.back(); }

  void check_point(Point x) const {
    if (x >= n_) {
      throw DomainError("unknown point " + std::to_string(x) + " in space '" + label_ + "' of size " +
                        std::to_string(n_));
    }
  }

  /// Exhaustive check of the metric axioms. Throws DomainError on the first failure.
  void validate() const {
    for (Point x = 0; x < n_; ++x) {
      if (dist_[x * n_ + x] != 0.0) throw DomainError("metric: nonzero diagonal");
      for (Point y = 0; y < n_; ++y) {
        const double dxy = dist_[x * n_ + y];
        if (!std::isfinite(dxy) || dxy < 0.0) throw DomainError("metric: negative or non-finite distance");
        if (dxy != dist_[y * n_ + x]) throw DomainError("metric: asymmetric distance");
        if (x != y && dxy <= 0.0) throw DomainError("metric: distinct points at distance 0");
      }
    }
    for (Point x = 0; x < n_; ++x) {
      for (Point y = 0; y < n_; ++y) {
        const double dxy = dist_[x * n_ + y];
        for (Point z = 0; z < n_; ++z) {
          if (dist_[x * n_ + z] > dxy + dist_[y * n_ + z]) {
            throw DomainError("metric: triangle inequality fails at (" + std::to_string(x) + "," +
                              std::to_string(y) + "," + std::to_string(z) + ")");
          }
        }
      }
    }
  }

  friend bool operator==(const MetricSpace& a, const MetricSpace& b) {
    return a.n_ == b.n_ && a.dist_ == b.dist_;
  }

 private:
  MetricSpace(std::string label, std::size_t n, std::vector<double> dist)
      : label_(std::move(label)), n_(n), dist_(std::move(dist)) {
    realized_ = dist_;
    std::sort(realized_.begin(), realized_.end());
    realized_.erase(std::unique(realized_.begin(), realized_.end()), realized_.end());
  }

  std::string label_;
  std::size_t n_;
  std::vector<double> dist_;
  std::vector<double> realized_;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

inline SpacePtr share(MetricSpace s) { return std::make_shared<const MetricSpace>(std::move(s)); }

/// Same point count and identical distances. Labels are ignored.
inline bool same_space(const MetricSpace& a, const MetricSpace& b) { return &a == &b || a == b; }

/// Closed ball {y : d(x,y) <= r}.
inline IndexSet ball(const MetricSpace& space, Point x, double r) {
  space.check_point(x);
  if (!(r >= 0.0)) throw DomainError("ball: negative radius");
  std::vector<Point> out;
  for (Point y = 0; y < space.size(); ++y) {
    if (space.dist(x, y) <= r) out.push_back(y);
  }
  return IndexSet(space.size(), std::move(out));
}

/// N_r = max_x |B_r(x)|.
inline std::size_t growth(const MetricSpace& space, double r) {
  if (!(r >= 0.0)) throw DomainError("growth: negative radius");
  const auto& d = space.distances();
  const std::size_t n = space.size();
  std::size_t best = 0;
  for (Point x = 0; x < n; ++x) {
    std::size_t count = 0;
    for (Point y = 0; y < n; ++y) count += d[x * n + y] <= r ? 1 : 0;
    best = std::max(best, count);
  }
  return best;
}

/// Diameter of a subset; 0 for empty and singleton sets.
inline double diameter(const MetricSpace& space, const IndexSet& set) {
  double best = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) best = std::max(best, space.dist(set[i], set[j]));
  }
  return best;
}

/// Distance from y to a nonempty set.
inline double dist_to_set(const MetricSpace& space, Point y, const IndexSet& set) {
  double best = std::numeric_limits<double>::infinity();
  for (Point a : set) best = std::min(best, space.dist(y, a));
  return best;
}

// ---------------------------------------------------------------------------
// Generators

namespace generate {

inline MetricSpace path(std::size_t n) {
  if (n == 0) throw DomainError("path: n must be >= 1");
  std::vector<Edge> edges;
  for (Point i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return MetricSpace::from_edges("path" + std::to_string(n), n, edges);
}

inline MetricSpace cycle(std::size_t n) {
  if (n == 0) throw DomainError("cycle: n must be >= 1");
  std::vector<Edge> edges;
  for (Point i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return MetricSpace::from_edges("cycle" + std::to_string(n), n, edges);
}

/// rows x cols grid graph; its path metric is the l1 metric. Point (i,j) has index i*cols+j.
inline MetricSpace grid(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw DomainError("grid: sizes must be >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const Point p = i * cols + j;
      if (j + 1 < cols) edges.emplace_back(p, p + 1);
      if (i + 1 < rows) edges.emplace_back(p, p + cols);
    }
  }
  return MetricSpace::from_edges("grid" + std::to_string(rows) + "x" + std::to_string(cols),
                                 rows * cols, edges);
}

/// Cayley graph of Z/orders[0] x ... x Z/orders[k-1] with the word metric of
/// the given generators. Generators are closed under inversion before use.
/// Elements are numbered in mixed radix, last coordinate fastest.
inline MetricSpace cayley(const std::vector<std::size_t>& orders,
                          const std::vector<std::vector<long long>>& generators) {
  if (orders.empty()) throw DomainError("cayley: no factors");
  std::size_t n = 1;
  for (auto o : orders) {
    if (o == 0) throw DomainError("cayley: factor order must be >= 1");
    n *= o;
  }
  const std::size_t k = orders.size();
  auto decode = [&](Point p) {
    std::vector<long long> c(k);
    for (std::size_t i = k; i-- > 0;) {
      c[i] = static_cast<long long>(p % orders[i]);
      p /= orders[i];
    }
    return c;
  };
  auto encode = [&](const std::vector<long long>& c) {
    Point p = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto o = static_cast<long long>(orders[i]);
      p = p * orders[i] + static_cast<Point>(((c[i] % o) + o) % o);
    }
    return p;
  };
  std::vector<Edge> edges;
  for (const auto& g : generators) {
    if (g.size() != k) throw DomainError("cayley: generator arity mismatch");
    for (Point p = 0; p < n; ++p) {
      auto c = decode(p);
      for (std::size_t i = 0; i < k; ++i) c[i] += g[i];
      // Undirected edges make the generating set symmetric.
      edges.emplace_back(p, encode(c));
    }
  }
  std::string label = "cayley_";
  for (std::size_t i = 0; i < k; ++i) label += (i ? "x" : "") + std::string("z") + std::to_string(orders[i]);
  return MetricSpace::from_edges(label, n, edges);
}

inline MetricSpace cayley_cyclic(std::size_t order, const std::vector<long long>& generators) {
  std::vector<std::vector<long long>> gens;
  for (auto g : generators) gens.push_back({g});
  return cayley({order}, gens);
}

enum class DisconnectedPolicy { regenerate, error };

/// Erdos-Renyi G(n, p) graph metric. Seeded; on a disconnected draw either
/// redraws (up to max_attempts) or throws.
inline MetricSpace random_graph(std::size_t n, double p, std::uint64_t seed,
                                DisconnectedPolicy policy = DisconnectedPolicy::regenerate,
                                int max_attempts = 1000) {
  if (n == 0) throw DomainError("random_graph: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("random_graph: p must lie in [0,1]");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Edge> edges;
    for (Point i = 0; i < n; ++i) {
      for (Point j = i + 1; j < n; ++j) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < p) edges.emplace_back(i, j);
      }
    }
    try {
      return MetricSpace::from_edges("gnp" + std::to_string(n) + "_s" + std::to_string(seed), n, edges);
    } catch (const DomainError&) {
      if (policy == DisconnectedPolicy::error) throw;
    }
  }
  throw DomainError("random_graph: no connected draw after " + std::to_string(max_attempts) + " attempts");
}

/// Relabeled copy: point perm[x] of the result plays the role of x.
inline MetricSpace relabeled(const MetricSpace& space, const std::vector<Point>& perm,
                             std::string label) {
  const std::size_t n = space.size();
  if (perm.size() != n) throw DomainError("relabeled: permutation size mismatch");
  std::vector<bool> seen(n, false);
  for (Point p : perm) {
    if (p >= n || seen[p]) throw DomainError("relabeled: not a permutation");
    seen[p] = true;
  }
  std::vector<double> dist(n * n);
  for (Point x = 0; x < n; ++x)
    for (Point y = 0; y < n; ++y) dist[perm[x] * n + perm[y]] = space.dist(x, y);
  return MetricSpace::from_distances(std::move(label), n, std::move(dist));
}

}  // namespace generate

}  // namespace roelab
