#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "patlas/error.hpp"
#include "patlas/grid.hpp"
#include "patlas/union_find.hpp"

namespace patlas {

enum class CriticalType { Minimum, Maximum, Saddle, Regular, Degenerate };

enum class PairKind { MinSaddle, SaddleMax };

/// Extremum-saddle pair. birth < death under the sweep order;
/// persistence_raw = death - birth. `persistence` is filled by
/// normalize_diagrams (largest raw persistence in the ensemble maps to 1).
struct PersistencePair {
  vertex_id extremum_vertex = -1;
  vertex_id paired_vertex = -1;
  double birth = 0.0;
  double death = 0.0;
  double persistence_raw = 0.0;
  double persistence = 0.0;
  PairKind kind = PairKind::MinSaddle;
};

struct PersistenceDiagram {
  int member_id = 0;
  std::vector<PersistencePair> pairs;
  double field_range = 0.0;
  bool normalized = false;
};

/// Lower/upper link classification. The link of v is the neighbor set plus
/// the triangulation edges between neighbors; a vertex is regular iff both
/// the lower and the upper part are nonempty and connected. Three or more
/// components on either side is reported as Degenerate (a multi-saddle,
/// counted as a saddle).
inline CriticalType classify_vertex(const ScalarFieldGrid& field, vertex_id v) {
  if (v < 0 || v >= field.topology.vertex_count())
    fail_validation("BAD_VERTEX", "vertex id out of range");
  std::array<vertex_id, 14> nbr{};
  std::array<bool, 14> lower{};
  int count = 0;
  for_each_neighbor(field.topology, v, [&](vertex_id u) {
    nbr[count] = u;
    lower[count] = value_less(field, u, v);
    ++count;
  });

  auto components = [&](bool want_lower) {
    std::array<int, 14> parent{};
    int n_side = 0;
    std::array<int, 14> side_index{};
    for (int i = 0; i < count; ++i) {
      side_index[i] = -1;
      if (lower[i] == want_lower) {
        side_index[i] = n_side;
        parent[n_side] = n_side;
        ++n_side;
      }
    }
    auto find = [&](int x) {
      while (x != parent[x]) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (int i = 0; i < count; ++i) {
      if (side_index[i] < 0) continue;
      for (int j = i + 1; j < count; ++j) {
        if (side_index[j] < 0) continue;
        if (are_adjacent(field.topology, nbr[i], nbr[j])) {
          int a = find(side_index[i]), b = find(side_index[j]);
          if (a != b) parent[b] = a;
        }
      }
    }
    int cc = 0;
    for (int i = 0; i < n_side; ++i)
      if (find(i) == i) ++cc;
    return cc;
  };

  int lower_cc = components(true);
  int upper_cc = components(false);
  if (lower_cc == 0) return CriticalType::Minimum;
  if (upper_cc == 0) return CriticalType::Maximum;
  if (lower_cc == 1 && upper_cc == 1) return CriticalType::Regular;
  if (lower_cc >= 3 || upper_cc >= 3) return CriticalType::Degenerate;
  return CriticalType::Saddle;
}

inline bool is_saddle_kind(CriticalType t) {
  return t == CriticalType::Saddle || t == CriticalType::Degenerate;
}

namespace detail {

struct RawPair {
  vertex_id extremum = -1;
  vertex_id paired = -1;
};

/// Ascending sub-level-set sweep with the Elder rule: when a vertex merges
/// several components, every component except the one with the oldest
/// (lowest) minimum dies and is paired at the merge vertex. The surviving
/// global minimum is paired against the last vertex of the sweep.
inline std::vector<RawPair> min_saddle_sweep(const GridTopology& topo,
                                             const std::vector<double>& vals) {
  const std::int64_t n = static_cast<std::int64_t>(vals.size());
  std::vector<vertex_id> order(n);
  for (std::int64_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), ValueOrder{&vals});

  UnionFind uf(n);
  std::vector<vertex_id> comp_min(n, -1);
  std::vector<char> processed(n, 0);
  ValueOrder older{&vals};

  std::vector<RawPair> pairs;
  std::array<std::int64_t, 14> roots{};
  for (vertex_id v : order) {
    int n_roots = 0;
    for_each_neighbor(topo, v, [&](vertex_id u) {
      if (!processed[u]) return;
      std::int64_t r = uf.find(u);
      for (int i = 0; i < n_roots; ++i)
        if (roots[i] == r) return;
      roots[n_roots++] = r;
    });
    processed[v] = 1;
    if (n_roots == 0) {
      comp_min[v] = v;  // new component, v is its minimum
      continue;
    }
    std::sort(roots.begin(), roots.begin() + n_roots,
              [&](std::int64_t a, std::int64_t b) { return older(comp_min[a], comp_min[b]); });
    for (int i = 1; i < n_roots; ++i) pairs.push_back({comp_min[roots[i]], v});
    vertex_id oldest = comp_min[roots[0]];
    std::int64_t root = roots[0];
    for (int i = 1; i < n_roots; ++i) root = uf.unite(root, roots[i]);
    root = uf.unite(root, v);
    comp_min[root] = oldest;
  }
  pairs.push_back({comp_min[uf.find(order.front())], order.back()});  // global pair
  return pairs;
}

inline std::vector<PersistencePair> finalize_pairs(const std::vector<RawPair>& raw,
                                                   const std::vector<double>& field_values,
                                                   PairKind kind) {
  std::vector<PersistencePair> out;
  out.reserve(raw.size());
  for (const auto& rp : raw) {
    PersistencePair p;
    p.kind = kind;
    p.extremum_vertex = rp.extremum;
    p.paired_vertex = rp.paired;
    if (kind == PairKind::MinSaddle) {
      p.birth = field_values[rp.extremum];
      p.death = field_values[rp.paired];
    } else {
      // Sweep ran on the negated field: birth/death negate and swap back.
      p.birth = field_values[rp.paired];
      p.death = field_values[rp.extremum];
    }
    p.persistence_raw = p.death - p.birth;
    out.push_back(p);
  }
  return out;
}

}  // namespace detail

/// Extremum-saddle pairs of one kind. MinSaddle sweeps the field ascending;
/// SaddleMax is the identical sweep on the negated field, mapped back, which
/// makes the negation duality exact by construction.
inline std::vector<PersistencePair> extremum_pairs(const ScalarFieldGrid& field, PairKind kind) {
  if (kind == PairKind::MinSaddle) {
    auto raw = detail::min_saddle_sweep(field.topology, field.values);
    return detail::finalize_pairs(raw, field.values, kind);
  }
  std::vector<double> neg(field.values.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -field.values[i];
  auto raw = detail::min_saddle_sweep(field.topology, neg);
  return detail::finalize_pairs(raw, field.values, kind);
}

namespace detail {

/// Oracle variant: after each vertex is added, the components of the
/// processed set are recomputed from scratch by flood fill; a component's
/// identity is its minimum. Minima that vanish from one step to the next
/// died at the newly added vertex.
inline std::vector<RawPair> brute_force_min_sweep(const GridTopology& topo,
                                                  const std::vector<double>& vals) {
  const std::int64_t n = static_cast<std::int64_t>(vals.size());
  std::vector<vertex_id> order(n);
  for (std::int64_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), ValueOrder{&vals});
  ValueOrder older{&vals};

  std::vector<char> processed(n, 0);
  std::vector<vertex_id> prev_minima;
  std::vector<RawPair> pairs;

  std::vector<std::int32_t> comp(n);
  std::deque<vertex_id> queue;
  for (vertex_id v : order) {
    processed[v] = 1;
    // Flood-fill components of the processed set.
    std::fill(comp.begin(), comp.end(), -1);
    std::vector<vertex_id> minima;
    std::int32_t n_comp = 0;
    for (std::int64_t s = 0; s < n; ++s) {
      if (!processed[s] || comp[s] >= 0) continue;
      vertex_id comp_minimum = s;
      comp[s] = n_comp;
      queue.push_back(s);
      while (!queue.empty()) {
        vertex_id u = queue.front();
        queue.pop_front();
        if (older(u, comp_minimum)) comp_minimum = u;
        for_each_neighbor(topo, u, [&](vertex_id w) {
          if (processed[w] && comp[w] < 0) {
            comp[w] = n_comp;
            queue.push_back(w);
          }
        });
      }
      minima.push_back(comp_minimum);
      ++n_comp;
    }
    std::sort(minima.begin(), minima.end(), older);
    std::vector<vertex_id> died;
    for (vertex_id m : prev_minima)
      if (!std::binary_search(minima.begin(), minima.end(), m, older)) died.push_back(m);
    for (vertex_id m : died) pairs.push_back({m, v});
    prev_minima = std::move(minima);
  }
  pairs.push_back({prev_minima.front(), order.back()});
  return pairs;
}

}  // namespace detail

/// Same contract as extremum_pairs, computed by explicit component tracking.
/// Guarded to small grids; this is the test oracle.
inline std::vector<PersistencePair> brute_force_pairs(const ScalarFieldGrid& field, PairKind kind) {
  if (field.topology.vertex_count() > 10000)
    fail_validation("GUARD", "brute_force_pairs is limited to 10^4 vertices");
  if (kind == PairKind::MinSaddle) {
    auto raw = detail::brute_force_min_sweep(field.topology, field.values);
    return detail::finalize_pairs(raw, field.values, kind);
  }
  std::vector<double> neg(field.values.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -field.values[i];
  auto raw = detail::brute_force_min_sweep(field.topology, neg);
  return detail::finalize_pairs(raw, field.values, kind);
}

/// Both pair kinds plus the field range.
inline PersistenceDiagram compute_diagram(const ScalarFieldGrid& field) {
  PersistenceDiagram d;
  d.member_id = field.member_id;
  d.pairs = extremum_pairs(field, PairKind::MinSaddle);
  auto maxima = extremum_pairs(field, PairKind::SaddleMax);
  d.pairs.insert(d.pairs.end(), maxima.begin(), maxima.end());
  auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  d.field_range = *hi - *lo;
  return d;
}

/// Divides every raw persistence by the largest raw persistence found across
/// ALL diagrams, so normalized persistences are cross-member comparable and
/// the most persistent pair of the ensemble gets exactly 1.
inline std::vector<PersistenceDiagram> normalize_diagrams(std::vector<PersistenceDiagram> diagrams) {
  if (diagrams.empty()) fail_validation("BAD_ENSEMBLE", "no diagrams to normalize");
  double pmax = 0.0;
  bool any_pair = false;
  for (const auto& d : diagrams)
    for (const auto& p : d.pairs) {
      any_pair = true;
      pmax = std::max(pmax, p.persistence_raw);
    }
  if (!any_pair) fail_validation("BAD_ENSEMBLE", "diagrams contain no pairs");
  if (pmax <= 0.0)
    fail_validation("ALL_CONSTANT", "all members are constant; persistence cannot be normalized");
  for (auto& d : diagrams) {
    for (auto& p : d.pairs) p.persistence = p.persistence_raw / pmax;
    d.normalized = true;
  }
  return diagrams;
}

/// Largest raw persistence across diagrams (the normalization constant).
inline double max_raw_persistence(const std::vector<PersistenceDiagram>& diagrams) {
  double pmax = 0.0;
  for (const auto& d : diagrams)
    for (const auto& p : d.pairs) pmax = std::max(pmax, p.persistence_raw);
  return pmax;
}

}  // namespace patlas
