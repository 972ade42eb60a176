#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "patlas/error.hpp"
#include "patlas/grid.hpp"
#include "patlas/parallel.hpp"
#include "patlas/persistence.hpp"

namespace patlas {

struct MapKinds {
  bool minima = true;
  bool maxima = true;
};

/// Density of salient extrema: one Gaussian per surviving pair, centered at
/// the extremum vertex, with amplitude alpha(c) = P(c) and spread
/// sigma(c) = gamma * P(c) (normalized persistence). Distances are physical
/// and divided by the bounding-box diagonal.
struct PersistenceMap {
  int member_id = 0;
  GridTopology topology;
  std::vector<double> phi;
  double gamma = 0.1;
  MapKinds kinds_used;
  double min_persistence_cull = 0.01;
};

namespace detail {

struct Kernel {
  std::array<std::int64_t, 3> center{0, 0, 0};
  double alpha = 0.0;
  double sigma = 0.0;
};

/// Accumulates the kernels of one kind into phi. The squared distance
/// factorizes over axes, so each kernel contributes
/// alpha * fx[i] * fy[j] * fz[k] from per-axis tables; every vertex is
/// evaluated for every kernel (no radius cutoff). Rows are processed in
/// parallel, kernels in fixed diagram order per vertex, so the result is
/// bit-identical for every thread count.
inline void accumulate_kernels(const GridTopology& topo, const std::vector<Kernel>& kernels,
                               int threads, std::vector<double>& phi) {
  if (kernels.empty()) return;
  const std::int64_t nx = topo.dims[0];
  const std::int64_t ny = topo.dims[1];
  const std::int64_t nz = topo.dim == 3 ? topo.dims[2] : 1;
  const double inv_diag = 1.0 / topo.bbox_diagonal;

  struct Tables {
    std::vector<double> fx, fy, fz;
  };
  std::vector<Tables> tables(kernels.size());
  for (std::size_t c = 0; c < kernels.size(); ++c) {
    const Kernel& k = kernels[c];
    const double inv_two_sigma_sq = 1.0 / (2.0 * k.sigma * k.sigma);
    auto fill = [&](std::vector<double>& t, std::int64_t extent, int axis) {
      t.resize(extent);
      for (std::int64_t i = 0; i < extent; ++i) {
        double d = static_cast<double>(i - k.center[axis]) * topo.spacing[axis] * inv_diag;
        t[i] = std::exp(-d * d * inv_two_sigma_sq);
      }
    };
    fill(tables[c].fx, nx, 0);
    fill(tables[c].fy, ny, 1);
    if (topo.dim == 3)
      fill(tables[c].fz, nz, 2);
    else
      tables[c].fz.assign(1, 1.0);
  }

  const std::int64_t n_rows = ny * nz;
  parallel_for(static_cast<std::size_t>(n_rows), threads, [&](std::size_t r) {
    const std::int64_t j = static_cast<std::int64_t>(r) % ny;
    const std::int64_t kz = static_cast<std::int64_t>(r) / ny;
    double* row = phi.data() + static_cast<std::int64_t>(r) * nx;
    for (std::size_t c = 0; c < kernels.size(); ++c) {
      const double scale = kernels[c].alpha * tables[c].fy[j] * tables[c].fz[kz];
      const double* fx = tables[c].fx.data();
      if (scale == 0.0) continue;  // adding +0 would not change any bit
      for (std::int64_t i = 0; i < nx; ++i) row[i] += scale * fx[i];
    }
  });
}

inline bool pair_survives(const PersistencePair& p, double cull) {
  // Zero-persistence pairs never contribute (sigma would be singular).
  return p.persistence > 0.0 && p.persistence >= cull;
}

}  // namespace detail

/// Map of one member from its normalized diagram. Minima and maxima kernels
/// are accumulated into separate partial sums and added at the end, so the
/// two-kind map equals the sum of the single-kind maps exactly.
inline PersistenceMap compute_map(const ScalarFieldGrid& field, const PersistenceDiagram& diagram,
                                  double gamma, MapKinds kinds, double cull, int threads = 1) {
  if (!(gamma > 0.0)) fail_validation("BAD_GAMMA", "gamma must be strictly positive");
  if (!(cull >= 0.0 && cull < 1.0)) fail_validation("BAD_CULL", "cull must be in [0, 1)");
  if (!diagram.normalized)
    fail_validation("NOT_NORMALIZED", "compute_map requires a normalized diagram");

  PersistenceMap map;
  map.member_id = field.member_id;
  map.topology = field.topology;
  map.gamma = gamma;
  map.kinds_used = kinds;
  map.min_persistence_cull = cull;

  std::vector<detail::Kernel> min_kernels, max_kernels;
  for (const auto& p : diagram.pairs) {
    if (!detail::pair_survives(p, cull)) continue;
    detail::Kernel k;
    k.center = delinearize(field.topology, p.extremum_vertex);
    k.alpha = p.persistence;
    k.sigma = gamma * p.persistence;
    if (p.kind == PairKind::MinSaddle && kinds.minima) min_kernels.push_back(k);
    if (p.kind == PairKind::SaddleMax && kinds.maxima) max_kernels.push_back(k);
  }

  const std::size_t n = static_cast<std::size_t>(field.topology.vertex_count());
  map.phi.assign(n, 0.0);
  if (!min_kernels.empty() && !max_kernels.empty()) {
    std::vector<double> phi_max(n, 0.0);
    detail::accumulate_kernels(field.topology, min_kernels, threads, map.phi);
    detail::accumulate_kernels(field.topology, max_kernels, threads, phi_max);
    parallel_for(n, threads, [&](std::size_t v) { map.phi[v] += phi_max[v]; });
  } else if (!min_kernels.empty()) {
    detail::accumulate_kernels(field.topology, min_kernels, threads, map.phi);
  } else if (!max_kernels.empty()) {
    detail::accumulate_kernels(field.topology, max_kernels, threads, map.phi);
  }
  return map;
}

struct MapConfig {
  double gamma = 0.1;
  double cull = 0.01;
  MapKinds kinds;
  int threads = 1;
};

struct EnsembleMaps {
  std::vector<PersistenceDiagram> diagrams;  // normalized
  std::vector<PersistenceMap> maps;
  double pmax_raw = 0.0;
};

/// Diagrams for every member (in parallel), ensemble-wide normalization,
/// then one map per member.
inline EnsembleMaps compute_ensemble_maps(const Ensemble& ensemble, const MapConfig& config) {
  EnsembleMaps out;
  out.diagrams.resize(ensemble.members.size());
  parallel_for(ensemble.members.size(), config.threads,
               [&](std::size_t i) { out.diagrams[i] = compute_diagram(ensemble.members[i]); });
  out.pmax_raw = max_raw_persistence(out.diagrams);
  out.diagrams = normalize_diagrams(std::move(out.diagrams));
  out.maps.resize(ensemble.members.size());
  parallel_for(ensemble.members.size(), config.threads, [&](std::size_t i) {
    out.maps[i] = compute_map(ensemble.members[i], out.diagrams[i], config.gamma, config.kinds,
                              config.cull, 1);
  });
  return out;
}

/// Convenience: ensemble-wide normalization composed with compute_map for a
/// single member.
inline PersistenceMap map_for_member(const Ensemble& ensemble, int member_id,
                                     const MapConfig& config) {
  if (member_id < 0 || member_id >= ensemble.n())
    fail_validation("BAD_MEMBER", "member id " + std::to_string(member_id) + " out of range");
  std::vector<PersistenceDiagram> diagrams(ensemble.members.size());
  parallel_for(ensemble.members.size(), config.threads,
               [&](std::size_t i) { diagrams[i] = compute_diagram(ensemble.members[i]); });
  diagrams = normalize_diagrams(std::move(diagrams));
  return compute_map(ensemble.members[member_id], diagrams[member_id], config.gamma, config.kinds,
                     config.cull, config.threads);
}

}  // namespace patlas
