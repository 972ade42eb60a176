#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "patlas/error.hpp"
#include "patlas/grid.hpp"
#include "patlas/persistence.hpp"

namespace patlas {

/// Pointwise bounds of a member subset: lower(v) = min over members,
/// upper(v) = max over members.
struct EnvelopePair {
  ScalarFieldGrid lower;
  ScalarFieldGrid upper;
  int cluster_id = 0;
  int m = 0;  // subset size
};

inline EnvelopePair envelopes(const Ensemble& ensemble, const std::vector<int>& member_ids,
                              int cluster_id = 0) {
  if (member_ids.empty()) fail_validation("BAD_CLUSTER", "envelope of an empty member set");
  const auto& first = ensemble.members.at(member_ids.front());
  EnvelopePair env;
  env.cluster_id = cluster_id;
  env.m = static_cast<int>(member_ids.size());
  env.lower = first;
  env.upper = first;
  for (std::size_t i = 1; i < member_ids.size(); ++i) {
    const auto& f = ensemble.members.at(member_ids[i]);
    for (std::size_t v = 0; v < f.values.size(); ++v) {
      env.lower.values[v] = std::min(env.lower.values[v], f.values[v]);
      env.upper.values[v] = std::max(env.upper.values[v], f.values[v]);
    }
  }
  return env;
}

/// A region in which every member of the subset is guaranteed to have a
/// local extremum of the matching kind with value inside the closed
/// interval.
struct MandatoryExtremum {
  CriticalType kind = CriticalType::Minimum;
  std::vector<vertex_id> component;  // sorted, connected in grid topology
  double interval_low = 0.0;
  double interval_high = 0.0;
  std::vector<double> likelihood;  // aligned with component; filled by the pipeline
  std::int32_t region_id = 0;
};

namespace detail {

/// Mandatory minima of an envelope given as plain value arrays. For each
/// local minimum of the upper bound (ascending), flood-fill the component of
/// {v : lower(v) <= upper(minimum)} containing it; a fill that touches an
/// already kept region is discarded (sub-level components nest, so the
/// smallest-isovalue component is the one kept). The interval is
/// [min lower, min upper] over the component.
inline std::vector<MandatoryExtremum> envelope_mandatory_minima(const GridTopology& topo,
                                                                const std::vector<double>& lower,
                                                                const std::vector<double>& upper) {
  const std::int64_t n = static_cast<std::int64_t>(lower.size());
  ValueOrder upper_less{&upper};

  std::vector<vertex_id> minima;
  for (vertex_id v = 0; v < n; ++v) {
    bool is_min = true;
    for_each_neighbor(topo, v, [&](vertex_id u) {
      if (upper_less(u, v)) is_min = false;
    });
    if (is_min) minima.push_back(v);
  }
  std::sort(minima.begin(), minima.end(), upper_less);

  std::vector<std::int32_t> region_of(n, -1);
  std::vector<std::int32_t> stamp(n, -1);
  std::vector<MandatoryExtremum> regions;
  std::deque<vertex_id> queue;
  std::vector<vertex_id> visited;

  for (std::size_t attempt = 0; attempt < minima.size(); ++attempt) {
    const vertex_id seed = minima[attempt];
    const double iso = upper[seed];
    const std::int32_t tag = static_cast<std::int32_t>(attempt);

    visited.clear();
    queue.clear();
    bool overlaps = region_of[seed] >= 0;
    stamp[seed] = tag;
    queue.push_back(seed);
    visited.push_back(seed);
    while (!queue.empty() && !overlaps) {
      vertex_id u = queue.front();
      queue.pop_front();
      for_each_neighbor(topo, u, [&](vertex_id w) {
        if (stamp[w] == tag || lower[w] > iso) return;
        if (region_of[w] >= 0) {
          overlaps = true;
          return;
        }
        stamp[w] = tag;
        queue.push_back(w);
        visited.push_back(w);
      });
    }
    if (overlaps) continue;

    MandatoryExtremum region;
    region.kind = CriticalType::Minimum;
    region.component = visited;
    std::sort(region.component.begin(), region.component.end());
    double lo = lower[region.component.front()];
    double hi = upper[region.component.front()];
    for (vertex_id v : region.component) {
      lo = std::min(lo, lower[v]);
      hi = std::min(hi, upper[v]);
    }
    region.interval_low = lo;
    region.interval_high = hi;
    const std::int32_t id = static_cast<std::int32_t>(regions.size());
    for (vertex_id v : region.component) region_of[v] = id;
    regions.push_back(std::move(region));
  }
  return regions;
}

}  // namespace detail

inline std::vector<MandatoryExtremum> mandatory_minima(const EnvelopePair& env) {
  return detail::envelope_mandatory_minima(env.lower.topology, env.lower.values,
                                           env.upper.values);
}

/// Maxima are the minima of the negated, swapped envelope; intervals are
/// negated and endpoint-swapped back.
inline std::vector<MandatoryExtremum> mandatory_maxima(const EnvelopePair& env) {
  std::vector<double> neg_lower(env.upper.values.size());
  std::vector<double> neg_upper(env.lower.values.size());
  for (std::size_t v = 0; v < neg_lower.size(); ++v) {
    neg_lower[v] = -env.upper.values[v];
    neg_upper[v] = -env.lower.values[v];
  }
  auto regions = detail::envelope_mandatory_minima(env.lower.topology, neg_lower, neg_upper);
  for (auto& r : regions) {
    r.kind = CriticalType::Maximum;
    double lo = -r.interval_high;
    double hi = -r.interval_low;
    r.interval_low = lo;
    r.interval_high = hi;
  }
  return regions;
}

/// Probability, per component vertex, that a member takes a value inside the
/// closed critical interval.
inline std::vector<double> likelihood(const Ensemble& ensemble, const std::vector<int>& member_ids,
                                      const MandatoryExtremum& region) {
  std::vector<double> out(region.component.size(), 0.0);
  const double m = static_cast<double>(member_ids.size());
  for (std::size_t i = 0; i < region.component.size(); ++i) {
    vertex_id v = region.component[i];
    int count = 0;
    for (int id : member_ids) {
      double x = ensemble.members[id].values[v];
      if (x >= region.interval_low && x <= region.interval_high) ++count;
    }
    out[i] = count / m;
  }
  return out;
}

inline double appearance_probability(int cluster_size, int total) {
  if (cluster_size <= 0 || cluster_size > total)
    fail_validation("BAD_CLUSTER", "cluster size must satisfy 0 < m <= n");
  return static_cast<double>(cluster_size) / static_cast<double>(total);
}

struct ClusterSummary {
  int cluster_id = 0;
  std::vector<int> member_ids;
  std::vector<MandatoryExtremum> mandatory_minima;
  std::vector<MandatoryExtremum> mandatory_maxima;
  double appearance_probability = 0.0;
};

}  // namespace patlas
