#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <vector>

#include "patlas/error.hpp"
#include "patlas/grid.hpp"
#include "patlas/hull.hpp"
#include "patlas/mandatory.hpp"
#include "patlas/map_space.hpp"
#include "patlas/persistence_map.hpp"

namespace patlas {

struct AtlasConfig {
  double gamma = 0.1;
  double cull = 0.01;
  int knn = 5;
  MapKinds kinds;
  int k = 0;        // 0 = auto (eigengap suggestion)
  long seed = 0;
  int threads = 0;  // 0 = auto
};

struct StageTimings {
  double persistence_maps = 0.0;
  double distance_matrix = 0.0;
  double embedding = 0.0;
  double clustering = 0.0;
  double mandatory = 0.0;
};

/// Per-cluster mandatory extremum regions composed over the whole ensemble,
/// plus everything the pipeline produced on the way there. Label fields
/// encode region_id = cluster_id * 10^4 + local index (1-based; 0 means no
/// region); where regions of different clusters overlap, the smallest
/// region id wins.
struct Atlas {
  AtlasConfig config;
  GridTopology topology;
  int n = 0;
  double pmax_raw = 0.0;
  std::vector<PersistenceMap> maps;
  DistanceMatrix distances;
  SpectralEmbedding embedding;  // full solve, n_d = n-1
  Clustering clustering;
  std::vector<ClusterSummary> summaries;
  std::vector<std::int32_t> label_min, label_max;
  std::vector<double> likelihood_min, likelihood_max;
  int suggested_k = -1;
  StageTimings timings;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void compose_labels(const std::vector<MandatoryExtremum>& regions,
                           std::vector<std::int32_t>& labels, std::vector<double>& likelihoods) {
  for (const auto& r : regions) {
    for (std::size_t i = 0; i < r.component.size(); ++i) {
      vertex_id v = r.component[i];
      if (labels[v] != 0) continue;  // smallest region id wins on overlap
      labels[v] = r.region_id;
      likelihoods[v] = r.likelihood[i];
    }
  }
}

}  // namespace detail

inline Atlas build_atlas(const Ensemble& ensemble, const AtlasConfig& config) {
  const int n = ensemble.n();
  if (config.k <= 0 && n < 4)
    fail_validation("BAD_N", "automatic cluster count needs at least 4 members");
  if (n < 2) fail_validation("BAD_ENSEMBLE", "atlas needs at least 2 members");
  if (config.k > n) fail_validation("BAD_K", "k exceeds the member count");

  Atlas atlas;
  atlas.config = config;
  atlas.topology = ensemble.topology;
  atlas.n = n;

  auto t0 = std::chrono::steady_clock::now();
  MapConfig map_config{config.gamma, config.cull, config.kinds, config.threads};
  EnsembleMaps maps = compute_ensemble_maps(ensemble, map_config);
  atlas.pmax_raw = maps.pmax_raw;
  atlas.maps = std::move(maps.maps);
  atlas.timings.persistence_maps = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  atlas.distances = distance_matrix(atlas.maps, config.threads);
  atlas.timings.distance_matrix = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Adjacency graph = knn_graph(atlas.distances, config.knn);
  SymmetricEigen eig = generalized_eigs(laplacian(graph));
  atlas.embedding = embed(eig, n - 1, config.knn);
  atlas.timings.embedding = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  atlas.suggested_k = n >= 4 ? suggest_k(eig.values) : -1;
  const int k = config.k > 0 ? config.k : atlas.suggested_k;
  SpectralEmbedding cluster_space = embed(eig, std::max(1, k - 1), config.knn);
  atlas.clustering = cluster(cluster_space, k, config.seed);
  atlas.clustering.suggested_k = atlas.suggested_k;
  atlas.timings.clustering = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  atlas.summaries.assign(k, ClusterSummary{});
  parallel_for(static_cast<std::size_t>(k), config.threads, [&](std::size_t c) {
    ClusterSummary& summary = atlas.summaries[c];
    summary.cluster_id = static_cast<int>(c);
    for (int x = 0; x < n; ++x)
      if (atlas.clustering.labels[x] == static_cast<int>(c)) summary.member_ids.push_back(x);
    summary.appearance_probability =
        appearance_probability(static_cast<int>(summary.member_ids.size()), n);
    EnvelopePair env = envelopes(ensemble, summary.member_ids, static_cast<int>(c));
    if (config.kinds.minima) summary.mandatory_minima = mandatory_minima(env);
    if (config.kinds.maxima) summary.mandatory_maxima = mandatory_maxima(env);
    int local = 0;
    auto assign_ids = [&](std::vector<MandatoryExtremum>& regions) {
      for (auto& r : regions) {
        ++local;
        if (local >= 10000) fail_validation("REGION_OVERFLOW", "more than 9999 regions in a cluster");
        r.region_id = static_cast<std::int32_t>(c) * 10000 + local;
        r.likelihood = likelihood(ensemble, summary.member_ids, r);
      }
    };
    assign_ids(summary.mandatory_minima);
    assign_ids(summary.mandatory_maxima);
  });

  const std::size_t vcount = static_cast<std::size_t>(ensemble.topology.vertex_count());
  atlas.label_min.assign(vcount, 0);
  atlas.label_max.assign(vcount, 0);
  atlas.likelihood_min.assign(vcount, 0.0);
  atlas.likelihood_max.assign(vcount, 0.0);
  for (const auto& summary : atlas.summaries) {
    detail::compose_labels(summary.mandatory_minima, atlas.label_min, atlas.likelihood_min);
    detail::compose_labels(summary.mandatory_maxima, atlas.label_max, atlas.likelihood_max);
  }
  atlas.timings.mandatory = detail::seconds_since(t0);
  return atlas;
}

struct PredictionEntry {
  vertex_id extremum = -1;
  PairKind kind = PairKind::MinSaddle;
  double persistence_raw = 0.0;
  int assigned_cluster = -1;
  std::int32_t region_id = 0;  // 0 = MISS
  bool hit = false;
};

struct PredictionReport {
  std::vector<std::vector<PredictionEntry>> per_member;
  std::int64_t hits = 0;
  std::int64_t total = 0;
  double hit_rate = 1.0;
};

namespace detail {

inline bool region_contains(const MandatoryExtremum& r, vertex_id v) {
  return std::binary_search(r.component.begin(), r.component.end(), v);
}

}  // namespace detail

/// Qualifying extrema of each test member (raw persistence above
/// threshold * field range) are looked up in the regions of the cluster
/// whose training member has the nearest persistence map. Containment is
/// spatial: the extremum vertex must lie in the region's component.
inline PredictionReport predict(const Atlas& atlas, const std::vector<ScalarFieldGrid>& tests,
                                double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    fail_validation("BAD_THRESHOLD", "persistence threshold must be in (0, 1)");
  PredictionReport report;
  report.per_member.resize(tests.size());
  for (std::size_t t = 0; t < tests.size(); ++t) {
    const ScalarFieldGrid& test = tests[t];
    if (!test.topology.same_as(atlas.topology))
      fail_validation("TOPOLOGY_MISMATCH", "test member topology differs from the atlas");

    PersistenceDiagram diagram = compute_diagram(test);
    // Normalize against the training scale so maps are comparable.
    for (auto& p : diagram.pairs) p.persistence = p.persistence_raw / atlas.pmax_raw;
    diagram.normalized = true;
    PersistenceMap map = compute_map(test, diagram, atlas.config.gamma, atlas.config.kinds,
                                     atlas.config.cull, atlas.config.threads);

    int nearest = 0;
    double best = field_l2_distance(map.phi, atlas.maps[0].phi);
    for (int x = 1; x < atlas.n; ++x) {
      double d = field_l2_distance(map.phi, atlas.maps[x].phi);
      if (d < best) {
        best = d;
        nearest = x;
      }
    }
    const int cluster_id = atlas.clustering.labels[nearest];
    const ClusterSummary& summary = atlas.summaries[cluster_id];

    const double range = diagram.field_range;
    for (const auto& p : diagram.pairs) {
      if (p.kind == PairKind::MinSaddle && !atlas.config.kinds.minima) continue;
      if (p.kind == PairKind::SaddleMax && !atlas.config.kinds.maxima) continue;
      if (!(p.persistence_raw > threshold * range)) continue;
      PredictionEntry entry;
      entry.extremum = p.extremum_vertex;
      entry.kind = p.kind;
      entry.persistence_raw = p.persistence_raw;
      entry.assigned_cluster = cluster_id;
      const auto& regions = p.kind == PairKind::MinSaddle ? summary.mandatory_minima
                                                          : summary.mandatory_maxima;
      for (const auto& r : regions) {
        if (detail::region_contains(r, p.extremum_vertex)) {
          entry.region_id = r.region_id;
          entry.hit = true;
          break;
        }
      }
      report.per_member[t].push_back(entry);
      ++report.total;
      if (entry.hit) ++report.hits;
    }
  }
  report.hit_rate = report.total == 0 ? 1.0 : static_cast<double>(report.hits) / report.total;
  return report;
}

inline PredictionReport predict(const Atlas& atlas, const ScalarFieldGrid& test, double threshold) {
  return predict(atlas, std::vector<ScalarFieldGrid>{test}, threshold);
}

struct BaselineRegion {
  std::vector<Point2> hull;
  std::vector<Point2> points;
};

struct BaselineResult {
  std::vector<BaselineRegion> regions;
  Clustering clustering;
  int suggested_k = -1;
  PredictionReport report;
};

/// Comparison baseline: pool the persistent training extrema as 2D points,
/// spectral-cluster them on plain Euclidean distance, take the convex hull
/// of each cluster, then test by point-in-hull membership (any hull counts,
/// smallest cluster id reported). Degenerate hulls accept points within half
/// a grid cell.
inline BaselineResult baseline_convex_hulls(const Ensemble& train,
                                            const std::vector<ScalarFieldGrid>& tests,
                                            double threshold, long seed, int knn = 5,
                                            int threads = 0) {
  if (train.topology.dim != 2)
    fail_validation("BAD_DIMS", "the convex hull baseline is 2D only");
  if (!(threshold > 0.0 && threshold < 1.0))
    fail_validation("BAD_THRESHOLD", "persistence threshold must be in (0, 1)");

  std::vector<PersistenceDiagram> diagrams(train.members.size());
  parallel_for(train.members.size(), threads,
               [&](std::size_t i) { diagrams[i] = compute_diagram(train.members[i]); });

  std::vector<Point2> points;
  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    const double range = diagrams[i].field_range;
    for (const auto& p : diagrams[i].pairs) {
      if (!(p.persistence_raw > threshold * range)) continue;
      auto pos = vertex_position(train.topology, p.extremum_vertex);
      points.push_back({pos[0], pos[1]});
    }
  }
  const int n_pts = static_cast<int>(points.size());
  if (n_pts < 4) fail_validation("BAD_N", "baseline needs at least 4 persistent training extrema");

  std::vector<double> raw(static_cast<std::size_t>(n_pts) * n_pts, 0.0);
  for (int x = 0; x < n_pts; ++x)
    for (int y = x + 1; y < n_pts; ++y) {
      double dx = points[x].x - points[y].x, dy = points[x].y - points[y].y;
      double d = std::sqrt(dx * dx + dy * dy);
      raw[static_cast<std::size_t>(x) * n_pts + y] = d;
      raw[static_cast<std::size_t>(y) * n_pts + x] = d;
    }
  DistanceMatrix matrix = normalize_distance_matrix(n_pts, std::move(raw));
  Adjacency graph = knn_graph(matrix, knn);
  SymmetricEigen eig = generalized_eigs(laplacian(graph));

  BaselineResult result;
  result.suggested_k = suggest_k(eig.values);
  const int k = result.suggested_k;
  SpectralEmbedding space = embed(eig, std::max(1, k - 1), knn);
  result.clustering = cluster(space, k, seed);
  result.clustering.suggested_k = result.suggested_k;

  result.regions.resize(k);
  for (int c = 0; c < k; ++c) {
    for (int x = 0; x < n_pts; ++x)
      if (result.clustering.labels[x] == c) result.regions[c].points.push_back(points[x]);
    result.regions[c].hull = convex_hull(result.regions[c].points);
  }

  const double eps = 0.5 * std::max(train.topology.spacing[0], train.topology.spacing[1]);
  PredictionReport& report = result.report;
  report.per_member.resize(tests.size());
  for (std::size_t t = 0; t < tests.size(); ++t) {
    if (!tests[t].topology.same_as(train.topology))
      fail_validation("TOPOLOGY_MISMATCH", "test member topology differs from the training set");
    PersistenceDiagram diagram = compute_diagram(tests[t]);
    const double range = diagram.field_range;
    for (const auto& p : diagram.pairs) {
      if (!(p.persistence_raw > threshold * range)) continue;
      auto pos = vertex_position(train.topology, p.extremum_vertex);
      PredictionEntry entry;
      entry.extremum = p.extremum_vertex;
      entry.kind = p.kind;
      entry.persistence_raw = p.persistence_raw;
      for (int c = 0; c < k; ++c) {
        if (hull_contains(result.regions[c].hull, {pos[0], pos[1]}, eps)) {
          entry.assigned_cluster = c;
          entry.region_id = c + 1;
          entry.hit = true;
          break;
        }
      }
      report.per_member[t].push_back(entry);
      ++report.total;
      if (entry.hit) ++report.hits;
    }
  }
  report.hit_rate = report.total == 0 ? 1.0 : static_cast<double>(report.hits) / report.total;
  return result;
}

struct EnsembleSplit {
  Ensemble train;
  std::vector<ScalarFieldGrid> test;
  std::vector<int> train_ids, test_ids;
};

/// Deterministic 50/50 split: member i trains iff (i + seed) is even.
/// Training members are re-numbered to contiguous ids.
inline EnsembleSplit split_ensemble(const Ensemble& ensemble, long seed) {
  EnsembleSplit split;
  std::vector<ScalarFieldGrid> train_members;
  for (int i = 0; i < ensemble.n(); ++i) {
    if (((i + seed) % 2 + 2) % 2 == 0) {
      ScalarFieldGrid f = ensemble.members[i];
      f.member_id = static_cast<int>(train_members.size());
      train_members.push_back(std::move(f));
      split.train_ids.push_back(i);
    } else {
      split.test.push_back(ensemble.members[i]);
      split.test_ids.push_back(i);
    }
  }
  if (train_members.empty() || split.test.empty())
    fail_validation("BAD_ENSEMBLE", "split needs at least 2 members");
  split.train = make_ensemble(std::move(train_members));
  return split;
}

}  // namespace patlas
