#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "patlas/error.hpp"

namespace patlas {

struct SymmetricEigen {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

/// Cyclic Jacobi rotations on a dense symmetric matrix (row-major n*n).
/// Converges to machine precision; n here is the ensemble size, so the
/// O(n^3)-per-sweep cost is irrelevant. Fails if the off-diagonal mass has
/// not vanished after 100 sweeps.
inline SymmetricEigen jacobi_eigendecomposition(std::vector<double> a, int n) {
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto at = [&](std::vector<double>& m, int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * n + c];
  };

  double norm_sq = 0.0;
  for (double x : a) norm_sq += x * x;
  const double tol = 1e-15 * std::sqrt(norm_sq);

  bool converged = false;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * at(a, p, q) * at(a, p, q);
    if (std::sqrt(off) <= tol) {
      converged = true;
      break;
    }
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = at(a, p, q);
        if (apq == 0.0) continue;
        double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);
        double app = at(a, p, p), aqq = at(a, q, q);
        at(a, p, p) = app - t * apq;
        at(a, q, q) = aqq + t * apq;
        at(a, p, q) = 0.0;
        at(a, q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            double arp = at(a, r, p), arq = at(a, r, q);
            at(a, r, p) = arp - s * (arq + tau * arp);
            at(a, p, r) = at(a, r, p);
            at(a, r, q) = arq + s * (arp - tau * arq);
            at(a, q, r) = at(a, r, q);
          }
          double vrp = at(v, r, p), vrq = at(v, r, q);
          at(v, r, p) = vrp - s * (vrq + tau * vrp);
          at(v, r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * at(a, p, q) * at(a, p, q);
    if (std::sqrt(off) > tol)
      fail_validation("NO_CONVERGENCE", "Jacobi eigensolver did not converge in 100 sweeps");
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int x, int y) {
    double dx = at(a, x, x), dy = at(a, y, y);
    if (dx != dy) return dx < dy;
    return x < y;
  });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    out.values[i] = at(a, perm[i], perm[i]);
    for (int r = 0; r < n; ++r) out.vectors[i][r] = at(v, r, perm[i]);
  }
  return out;
}

}  // namespace patlas
