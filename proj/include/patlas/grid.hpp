#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "patlas/error.hpp"

namespace patlas {

using vertex_id = std::int64_t;

/// Regular grid domain, 2D or 3D. Connectivity is the implicit Freudenthal
/// triangulation: quads are split along the (i,j)->(i+1,j+1) diagonal, cubes
/// into six tetrahedra along the main diagonal. Two vertices are adjacent iff
/// their index difference is componentwise in {0,1} or in {0,-1}, which gives
/// the constant 6-neighbor stencil in 2D and 14 in 3D (clipped at the
/// boundary). The triangulation is never materialized.
struct GridTopology {
  int dim = 2;
  std::array<std::int64_t, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  double bbox_diagonal = 0.0;

  std::int64_t vertex_count() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= dims[a];
    return n;
  }

  bool same_as(const GridTopology& other) const {
    return dim == other.dim && dims == other.dims && spacing == other.spacing &&
           origin == other.origin;
  }
};

/// Vertex ids are x-fastest, then y, then z.
inline vertex_id linearize(const GridTopology& topo, const std::array<std::int64_t, 3>& idx) {
  if (topo.dim == 2) return idx[0] + topo.dims[0] * idx[1];
  return idx[0] + topo.dims[0] * (idx[1] + topo.dims[1] * idx[2]);
}

inline std::array<std::int64_t, 3> delinearize(const GridTopology& topo, vertex_id v) {
  std::array<std::int64_t, 3> idx{0, 0, 0};
  idx[0] = v % topo.dims[0];
  v /= topo.dims[0];
  idx[1] = v % topo.dims[1];
  if (topo.dim == 3) idx[2] = v / topo.dims[1];
  return idx;
}

inline std::array<double, 3> vertex_position(const GridTopology& topo, vertex_id v) {
  auto idx = delinearize(topo, v);
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int a = 0; a < topo.dim; ++a) p[a] = topo.origin[a] + static_cast<double>(idx[a]) * topo.spacing[a];
  return p;
}

inline GridTopology build_grid(const std::vector<std::int64_t>& dims,
                               const std::vector<double>& spacing,
                               const std::vector<double>& origin) {
  if (dims.size() != 2 && dims.size() != 3)
    fail_validation("BAD_DIMS", "grid must be 2D or 3D, got " + std::to_string(dims.size()) + " extents");
  if (spacing.size() != dims.size() || origin.size() != dims.size())
    fail_validation("BAD_DIMS", "spacing/origin arity must match dims");
  GridTopology topo;
  topo.dim = static_cast<int>(dims.size());
  for (int a = 0; a < topo.dim; ++a) {
    if (dims[a] < 2)
      fail_validation("BAD_DIMS", "extent " + std::to_string(a) + " is " + std::to_string(dims[a]) + ", must be >= 2");
    if (!(spacing[a] > 0.0))
      fail_validation("BAD_SPACING", "spacing " + std::to_string(a) + " must be strictly positive");
    topo.dims[a] = dims[a];
    topo.spacing[a] = spacing[a];
    topo.origin[a] = origin[a];
  }
  double sq = 0.0;
  for (int a = 0; a < topo.dim; ++a) {
    double side = static_cast<double>(topo.dims[a] - 1) * topo.spacing[a];
    sq += side * side;
  }
  topo.bbox_diagonal = std::sqrt(sq);
  return topo;
}

namespace detail {
// Nonzero 0/1 offset vectors and their negations: the Freudenthal 1-ring.
inline constexpr std::array<std::array<int, 3>, 6> kStencil2{{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {1, 1, 0}, {-1, -1, 0},
}};
inline constexpr std::array<std::array<int, 3>, 14> kStencil3{{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
    {1, 1, 0}, {-1, -1, 0}, {0, 1, 1}, {0, -1, -1}, {1, 0, 1}, {-1, 0, -1},
    {1, 1, 1}, {-1, -1, -1},
}};
}  // namespace detail

/// Visits the 1-ring of v (boundary-clipped stencil). No allocation.
template <typename F>
inline void for_each_neighbor(const GridTopology& topo, vertex_id v, F&& fn) {
  const auto idx = delinearize(topo, v);
  auto visit = [&](const std::array<int, 3>& off) {
    std::array<std::int64_t, 3> u{idx[0] + off[0], idx[1] + off[1], idx[2] + off[2]};
    for (int a = 0; a < topo.dim; ++a)
      if (u[a] < 0 || u[a] >= topo.dims[a]) return;
    fn(linearize(topo, u));
  };
  if (topo.dim == 2) {
    for (const auto& off : detail::kStencil2) visit(off);
  } else {
    for (const auto& off : detail::kStencil3) visit(off);
  }
}

inline std::vector<vertex_id> vertex_neighbors(const GridTopology& topo, vertex_id v) {
  if (v < 0 || v >= topo.vertex_count())
    fail_validation("BAD_VERTEX", "vertex id " + std::to_string(v) + " out of range");
  std::vector<vertex_id> out;
  out.reserve(topo.dim == 2 ? 6 : 14);
  for_each_neighbor(topo, v, [&](vertex_id u) { out.push_back(u); });
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff u and w share an edge of the triangulation (index difference
/// componentwise in {0,1} or in {0,-1}, not all zero).
inline bool are_adjacent(const GridTopology& topo, vertex_id u, vertex_id w) {
  if (u == w) return false;
  auto a = delinearize(topo, u);
  auto b = delinearize(topo, w);
  bool has_pos = false, has_neg = false;
  for (int ax = 0; ax < topo.dim; ++ax) {
    std::int64_t d = b[ax] - a[ax];
    if (d > 1 || d < -1) return false;
    if (d == 1) has_pos = true;
    if (d == -1) has_neg = true;
  }
  return !(has_pos && has_neg);
}

/// One ensemble member: values at vertices, linearly interpolated elsewhere.
struct ScalarFieldGrid {
  GridTopology topology;
  std::vector<double> values;
  int member_id = 0;
};

inline ScalarFieldGrid make_field(const GridTopology& topo, std::vector<double> values, int member_id = 0) {
  if (static_cast<std::int64_t>(values.size()) != topo.vertex_count())
    fail_validation("BAD_FIELD", "value count " + std::to_string(values.size()) +
                                     " does not match vertex count " + std::to_string(topo.vertex_count()));
  for (double x : values)
    if (!std::isfinite(x)) fail_validation("BAD_FIELD", "field values must be finite");
  return ScalarFieldGrid{topo, std::move(values), member_id};
}

/// Injective total order on vertices: lexicographic (value, vertex id).
/// This is the simulation-of-simplicity tie-break used by every sweep.
inline bool value_less(const ScalarFieldGrid& f, vertex_id u, vertex_id v) {
  double fu = f.values[u], fv = f.values[v];
  if (fu != fv) return fu < fv;
  return u < v;
}

struct ValueOrder {
  const std::vector<double>* values;
  bool operator()(vertex_id u, vertex_id v) const {
    double fu = (*values)[u], fv = (*values)[v];
    if (fu != fv) return fu < fv;
    return u < v;
  }
};

struct Ensemble {
  GridTopology topology;
  std::vector<ScalarFieldGrid> members;

  int n() const { return static_cast<int>(members.size()); }
};

inline Ensemble make_ensemble(std::vector<ScalarFieldGrid> members) {
  if (members.empty()) fail_validation("BAD_ENSEMBLE", "ensemble must have at least one member");
  Ensemble e;
  e.topology = members.front().topology;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].topology.same_as(e.topology))
      fail_validation("TOPOLOGY_MISMATCH", "member " + std::to_string(i) + " has a different topology");
    if (members[i].member_id != static_cast<int>(i))
      fail_validation("BAD_MEMBER", "member ids must equal list position; member at position " +
                                        std::to_string(i) + " has id " + std::to_string(members[i].member_id));
  }
  e.members = std::move(members);
  return e;
}

}  // namespace patlas
