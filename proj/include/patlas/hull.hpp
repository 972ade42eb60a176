#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace patlas {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator<(const Point2& a, const Point2& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}
inline bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Monotone chain. Returns the hull counterclockwise without the closing
/// point; collinear inputs collapse to their two extremes, a single distinct
/// point to itself.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double len_sq = vx * vx + vy * vy;
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len_sq, 0.0, 1.0);
  double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

/// Containment test. Proper polygons count their boundary as inside;
/// degenerate hulls (point, segment) accept anything within eps.
inline bool hull_contains(const std::vector<Point2>& hull, const Point2& p, double eps) {
  if (hull.empty()) return false;
  if (hull.size() == 1) {
    double dx = p.x - hull[0].x, dy = p.y - hull[0].y;
    return std::sqrt(dx * dx + dy * dy) <= eps;
  }
  if (hull.size() == 2) return point_segment_distance(p, hull[0], hull[1]) <= eps;
  double scale = 0.0;
  for (const auto& v : hull) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  const double boundary_slack = 1e-12 * std::max(scale, 1.0);
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < -boundary_slack) return false;
  }
  return true;
}

}  // namespace patlas
