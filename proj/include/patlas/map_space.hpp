#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <vector>

#include "patlas/eigen.hpp"
#include "patlas/error.hpp"
#include "patlas/parallel.hpp"
#include "patlas/persistence_map.hpp"

namespace patlas {

/// Symmetric pairwise distances, divided by the largest entry so the maximum
/// is 1 (all-zero matrices stay zero). Rescaling preserves neighbor ranks.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> entries;  // n*n, row-major
  double max_raw = 0.0;

  double at(int x, int y) const { return entries[static_cast<std::size_t>(x) * n + y]; }
};

inline DistanceMatrix normalize_distance_matrix(int n, std::vector<double> raw) {
  DistanceMatrix m;
  m.n = n;
  m.max_raw = *std::max_element(raw.begin(), raw.end());
  if (m.max_raw > 0.0)
    for (double& x : raw) x /= m.max_raw;
  m.entries = std::move(raw);
  return m;
}

/// Vertex-wise L2 distance between two fields defined on the same grid.
inline double field_l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    double d = a[v] - b[v];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline DistanceMatrix distance_matrix(const std::vector<PersistenceMap>& maps, int threads = 1) {
  const int n = static_cast<int>(maps.size());
  if (n < 2) fail_validation("BAD_ENSEMBLE", "distance matrix requires at least 2 maps");
  for (const auto& m : maps)
    if (!m.topology.same_as(maps.front().topology))
      fail_validation("TOPOLOGY_MISMATCH", "all maps must share a topology");

  std::vector<double> raw(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<std::pair<int, int>> todo;
  todo.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) todo.emplace_back(x, y);
  parallel_for(todo.size(), threads, [&](std::size_t t) {
    auto [x, y] = todo[t];
    double d = field_l2_distance(maps[x].phi, maps[y].phi);
    raw[static_cast<std::size_t>(x) * n + y] = d;
    raw[static_cast<std::size_t>(y) * n + x] = d;
  });
  return normalize_distance_matrix(n, std::move(raw));
}

struct Adjacency {
  int n = 0;
  std::vector<char> edges;  // n*n symmetric, zero diagonal

  bool at(int x, int y) const { return edges[static_cast<std::size_t>(x) * n + y] != 0; }
};

/// Mutual-or union kNN graph: x-y connected iff y is among the n_n nearest
/// of x or vice versa (ties by smaller member id). Union symmetrization
/// guarantees minimum degree n_n, so no vertex is isolated.
inline Adjacency knn_graph(const DistanceMatrix& m, int n_n) {
  if (n_n < 1 || n_n >= m.n)
    fail_validation("BAD_KNN", "neighbor count must satisfy 1 <= n_n < n (n_n=" +
                                   std::to_string(n_n) + ", n=" + std::to_string(m.n) + ")");
  Adjacency adj;
  adj.n = m.n;
  adj.edges.assign(static_cast<std::size_t>(m.n) * m.n, 0);
  std::vector<int> candidates(m.n - 1);
  for (int x = 0; x < m.n; ++x) {
    int c = 0;
    for (int y = 0; y < m.n; ++y)
      if (y != x) candidates[c++] = y;
    std::partial_sort(candidates.begin(), candidates.begin() + n_n, candidates.end(),
                      [&](int a, int b) {
                        double da = m.at(x, a), db = m.at(x, b);
                        if (da != db) return da < db;
                        return a < b;
                      });
    for (int i = 0; i < n_n; ++i) {
      int y = candidates[i];
      adj.edges[static_cast<std::size_t>(x) * m.n + y] = 1;
      adj.edges[static_cast<std::size_t>(y) * m.n + x] = 1;
    }
  }
  return adj;
}

inline int component_count(const Adjacency& adj) {
  std::vector<char> seen(adj.n, 0);
  std::deque<int> queue;
  int count = 0;
  for (int s = 0; s < adj.n; ++s) {
    if (seen[s]) continue;
    ++count;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int w = 0; w < adj.n; ++w)
        if (adj.at(u, w) && !seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
    }
  }
  return count;
}

struct GraphLaplacian {
  int n = 0;
  std::vector<double> w;        // binary weights
  std::vector<double> degrees;  // diagonal of D
  std::vector<double> l;        // L = D - W

  double lap(int x, int y) const { return l[static_cast<std::size_t>(x) * n + y]; }
};

inline GraphLaplacian laplacian(const Adjacency& adj) {
  GraphLaplacian g;
  g.n = adj.n;
  g.w.assign(static_cast<std::size_t>(adj.n) * adj.n, 0.0);
  g.l.assign(static_cast<std::size_t>(adj.n) * adj.n, 0.0);
  g.degrees.assign(adj.n, 0.0);
  for (int x = 0; x < adj.n; ++x) {
    double deg = 0.0;
    for (int y = 0; y < adj.n; ++y) {
      if (x != y && adj.at(x, y)) {
        g.w[static_cast<std::size_t>(x) * adj.n + y] = 1.0;
        g.l[static_cast<std::size_t>(x) * adj.n + y] = -1.0;
        deg += 1.0;
      }
    }
    if (deg == 0.0)
      fail_validation("DEGREE_ZERO", "vertex " + std::to_string(x) +
                                         " is isolated; the degree matrix is singular");
    g.degrees[x] = deg;
    g.l[static_cast<std::size_t>(x) * adj.n + x] = deg;
  }
  return g;
}

/// Solves L psi = lambda D psi through the symmetric reduction
/// B = D^(-1/2) L D^(-1/2), maps eigenvectors back as psi = D^(-1/2) u and
/// fixes the sign so the largest-magnitude entry of each psi is positive.
inline SymmetricEigen generalized_eigs(const GraphLaplacian& g) {
  const int n = g.n;
  std::vector<double> inv_sqrt_d(n);
  for (int i = 0; i < n; ++i) inv_sqrt_d[i] = 1.0 / std::sqrt(g.degrees[i]);
  std::vector<double> b(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      b[static_cast<std::size_t>(x) * n + y] = inv_sqrt_d[x] * g.lap(x, y) * inv_sqrt_d[y];
  SymmetricEigen eig = jacobi_eigendecomposition(std::move(b), n);
  for (auto& vec : eig.vectors) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      vec[i] *= inv_sqrt_d[i];
      if (std::abs(vec[i]) > best) {
        best = std::abs(vec[i]);
        arg = i;
      }
    }
    if (vec[arg] < 0.0)
      for (double& x : vec) x = -x;
  }
  return eig;
}

/// Member x sits at (psi_1(x), ..., psi_nd(x)); psi_0 is discarded. Planar
/// views use the first two coordinates.
struct SpectralEmbedding {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  std::vector<std::vector<double>> coords;  // n x n_d
  int n_d = 0;
  int knn = 0;
  std::vector<double> eigengaps;  // gap k = |lambda_k - lambda_{k+1}|, k = 1..n-2
};

inline std::vector<double> eigengaps_of(const std::vector<double>& eigenvalues) {
  const int n = static_cast<int>(eigenvalues.size());
  std::vector<double> gaps;
  for (int i = 0; i + 1 < n - 1; ++i) gaps.push_back(std::abs(eigenvalues[i] - eigenvalues[i + 1]));
  return gaps;
}

inline SpectralEmbedding embed(const SymmetricEigen& eig, int n_d, int knn_used = 0) {
  const int n = static_cast<int>(eig.values.size());
  if (n_d < 1 || n_d > n - 1)
    fail_validation("BAD_ND", "embedding dimension must satisfy 1 <= n_d <= n-1");
  SpectralEmbedding e;
  e.eigenvalues = eig.values;
  e.eigenvectors = eig.vectors;
  e.n_d = n_d;
  e.knn = knn_used;
  e.eigengaps = eigengaps_of(eig.values);
  e.coords.assign(n, std::vector<double>(n_d));
  for (int x = 0; x < n; ++x)
    for (int j = 0; j < n_d; ++j) e.coords[x][j] = eig.vectors[j + 1][x];
  return e;
}

/// First local maximum of the eigengap sequence, plateau-aware: gaps within
/// 1e-9 of the largest gap's scale of each other form one plateau; the first
/// plateau that rises above its predecessor and is followed by a strictly
/// smaller plateau (or by nothing) wins. The plateau tolerance keeps the
/// near-zero gaps of a multi-component spectrum from splitting on rounding
/// noise.
inline int suggest_k(const std::vector<double>& eigenvalues) {
  const int n = static_cast<int>(eigenvalues.size());
  if (n < 4) fail_validation("BAD_N", "eigengap suggestion requires at least 4 members");
  std::vector<double> gaps;
  for (int k = 1; k <= n - 2; ++k) gaps.push_back(std::abs(eigenvalues[k - 1] - eigenvalues[k]));
  const int m = static_cast<int>(gaps.size());
  const double tol = 1e-9 * *std::max_element(gaps.begin(), gaps.end());

  int i = 0;
  double prev_value = 0.0;
  bool has_prev = false;
  while (i < m) {
    double value = gaps[i];
    int j = i;
    while (j + 1 < m && std::abs(gaps[j + 1] - value) <= tol) ++j;
    bool rises = !has_prev || value > prev_value + tol;
    bool falls = (j + 1 >= m) || gaps[j + 1] < value - tol;
    if (rises && falls) return i + 1;  // gap index k = position + 1
    prev_value = value;
    has_prev = true;
    i = j + 1;
  }
  return m;  // unreachable: the last rising plateau always matches
}

struct Clustering {
  int k = 0;
  std::vector<int> labels;
  std::vector<int> medoids;  // member ids, one per cluster
  double objective = 0.0;
  std::vector<double> objective_trace;
  int suggested_k = -1;
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

/// Lloyd relaxation with medoid snap: each new centroid is the member
/// closest to its cluster barycenter. Initialization is a deterministic
/// farthest-point traversal from member (seed mod n); every tie anywhere
/// breaks toward the smaller member id, so the result is reproducible and
/// tolerant of coincident embedding coordinates.
inline Clustering cluster(const SpectralEmbedding& embedding, int k, long seed) {
  const int n = static_cast<int>(embedding.coords.size());
  if (k < 1 || k > n)
    fail_validation("BAD_K", "cluster count must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                                 ", n=" + std::to_string(n) + ")");
  const auto& pts = embedding.coords;
  Clustering result;
  result.k = k;

  if (k == 1) {
    result.labels.assign(n, 0);
    std::vector<double> bary(embedding.n_d, 0.0);
    for (const auto& p : pts)
      for (int j = 0; j < embedding.n_d; ++j) bary[j] += p[j];
    for (double& x : bary) x /= n;
    int medoid = 0;
    double best = detail::sq_dist(pts[0], bary);
    for (int x = 1; x < n; ++x) {
      double d = detail::sq_dist(pts[x], bary);
      if (d < best) {
        best = d;
        medoid = x;
      }
    }
    result.medoids = {medoid};
    double obj = 0.0;
    for (const auto& p : pts) obj += detail::sq_dist(p, pts[medoid]);
    result.objective = obj;
    result.objective_trace = {obj};
    return result;
  }

  // Farthest-point initialization.
  std::vector<int> medoids;
  std::vector<char> is_medoid(n, 0);
  int first = static_cast<int>(((seed % n) + n) % n);
  medoids.push_back(first);
  is_medoid[first] = 1;
  std::vector<double> nearest_sq(n);
  while (static_cast<int>(medoids.size()) < k) {
    for (int x = 0; x < n; ++x) {
      double best = detail::sq_dist(pts[x], pts[medoids[0]]);
      for (std::size_t j = 1; j < medoids.size(); ++j)
        best = std::min(best, detail::sq_dist(pts[x], pts[medoids[j]]));
      nearest_sq[x] = best;
    }
    int pick = -1;
    double best = -1.0;
    for (int x = 0; x < n; ++x) {
      if (is_medoid[x]) continue;
      if (nearest_sq[x] > best) {
        best = nearest_sq[x];
        pick = x;
      }
    }
    medoids.push_back(pick);
    is_medoid[pick] = 1;
  }

  auto assign = [&](std::vector<int>& labels) {
    labels.assign(n, 0);
    for (int x = 0; x < n; ++x) {
      int best_j = 0;
      double best_d = detail::sq_dist(pts[x], pts[medoids[0]]);
      int best_medoid = medoids[0];
      for (int j = 1; j < k; ++j) {
        double d = detail::sq_dist(pts[x], pts[medoids[j]]);
        if (d < best_d || (d == best_d && medoids[j] < best_medoid)) {
          best_d = d;
          best_j = j;
          best_medoid = medoids[j];
        }
      }
      labels[x] = best_j;
    }
    for (int j = 0; j < k; ++j) labels[medoids[j]] = j;  // a medoid owns itself
    // Repair empty clusters deterministically.
    std::vector<int> size(k, 0);
    for (int l : labels) ++size[l];
    for (int j = 0; j < k; ++j) {
      if (size[j] > 0) continue;
      int pick = -1;
      double best = -1.0;
      for (int x = 0; x < n; ++x) {
        bool medoid_now = false;
        for (int q = 0; q < k; ++q) medoid_now |= (medoids[q] == x);
        if (medoid_now) continue;
        double d = detail::sq_dist(pts[x], pts[medoids[labels[x]]]);
        if (d > best) {
          best = d;
          pick = x;
        }
      }
      if (pick < 0) continue;  // fewer distinct points than clusters
      --size[labels[pick]];
      medoids[j] = pick;
      labels[pick] = j;
      ++size[j];
    }
  };

  auto objective_of = [&](const std::vector<int>& labels) {
    double obj = 0.0;
    for (int x = 0; x < n; ++x) obj += detail::sq_dist(pts[x], pts[medoids[labels[x]]]);
    return obj;
  };

  std::vector<int> labels;
  assign(labels);
  result.objective_trace.push_back(objective_of(labels));
  for (int iter = 0; iter < 100; ++iter) {
    // Snap each centroid to the member nearest the cluster barycenter.
    for (int j = 0; j < k; ++j) {
      std::vector<double> bary(embedding.n_d, 0.0);
      int count = 0;
      for (int x = 0; x < n; ++x) {
        if (labels[x] != j) continue;
        for (int t = 0; t < embedding.n_d; ++t) bary[t] += pts[x][t];
        ++count;
      }
      for (double& b : bary) b /= count;
      int pick = -1;
      double best = 0.0;
      for (int x = 0; x < n; ++x) {
        if (labels[x] != j) continue;
        double d = detail::sq_dist(pts[x], bary);
        if (pick < 0 || d < best) {
          best = d;
          pick = x;
        }
      }
      medoids[j] = pick;
    }
    std::vector<int> new_labels;
    assign(new_labels);
    result.objective_trace.push_back(objective_of(new_labels));
    bool stable = new_labels == labels;
    labels = std::move(new_labels);
    if (stable) break;
  }

  result.labels = std::move(labels);
  result.medoids = std::move(medoids);
  result.objective = result.objective_trace.back();
  return result;
}

}  // namespace patlas
