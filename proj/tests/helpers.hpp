#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "patlas/grid.hpp"
#include "patlas/mandatory.hpp"
#include "patlas/persistence.hpp"
#include "patlas/rng.hpp"

namespace test_helpers {

inline patlas::ScalarFieldGrid random_field(const patlas::GridTopology& topo, std::uint64_t seed,
                                            int member_id = 0, double lo = 0.0, double hi = 1.0) {
  patlas::SplitMix64 rng = patlas::SplitMix64::substream(seed, member_id);
  std::vector<double> values(topo.vertex_count());
  for (double& v : values) v = rng.uniform(lo, hi);
  return patlas::make_field(topo, std::move(values), member_id);
}

/// Random field drawn from few distinct levels, to stress tie handling.
inline patlas::ScalarFieldGrid random_plateau_field(const patlas::GridTopology& topo,
                                                    std::uint64_t seed, int levels,
                                                    int member_id = 0) {
  patlas::SplitMix64 rng = patlas::SplitMix64::substream(seed, member_id);
  std::vector<double> values(topo.vertex_count());
  for (double& v : values) v = static_cast<double>(rng.next() % levels);
  return patlas::make_field(topo, std::move(values), member_id);
}

/// Multiset signature of a diagram for exact comparisons.
inline std::vector<std::tuple<patlas::vertex_id, patlas::vertex_id, double, double>> pair_multiset(
    const std::vector<patlas::PersistencePair>& pairs) {
  std::vector<std::tuple<patlas::vertex_id, patlas::vertex_id, double, double>> out;
  for (const auto& p : pairs) out.emplace_back(p.extremum_vertex, p.paired_vertex, p.birth, p.death);
  std::sort(out.begin(), out.end());
  return out;
}

/// The defining property of a mandatory region: every member of the subset
/// has at least one local extremum of the matching kind inside the component
/// with value in the closed interval.
inline bool guarantee_holds(const patlas::Ensemble& e, const std::vector<int>& member_ids,
                            const patlas::MandatoryExtremum& region) {
  for (int id : member_ids) {
    const auto& f = e.members[id];
    bool found = false;
    for (patlas::vertex_id v : region.component) {
      if (f.values[v] < region.interval_low || f.values[v] > region.interval_high) continue;
      auto type = patlas::classify_vertex(f, v);
      if (region.kind == patlas::CriticalType::Minimum && type == patlas::CriticalType::Minimum)
        found = true;
      if (region.kind == patlas::CriticalType::Maximum && type == patlas::CriticalType::Maximum)
        found = true;
      if (found) break;
    }
    if (!found) return false;
  }
  return true;
}

inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, long> cont;
  std::map<int, long> row, col;
  for (std::size_t i = 0; i < n; ++i) {
    ++cont[{a[i], b[i]}];
    ++row[a[i]];
    ++col[b[i]];
  }
  auto choose2 = [](long m) { return 0.5 * m * (m - 1); };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : cont) sum_ij += choose2(c);
  for (const auto& [key, c] : row) sum_a += choose2(c);
  for (const auto& [key, c] : col) sum_b += choose2(c);
  const double expected = sum_a * sum_b / choose2(static_cast<long>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

}  // namespace test_helpers
