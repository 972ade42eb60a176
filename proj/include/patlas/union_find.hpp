#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace patlas {

// Disjoint sets with path halving + union by rank.
struct UnionFind {
  std::vector<std::int64_t> parent;
  std::vector<std::int32_t> rank;

  explicit UnionFind(std::int64_t n) : parent(n), rank(n, 0) {
    std::iota(parent.begin(), parent.end(), std::int64_t{0});
  }

  std::int64_t find(std::int64_t i) {
    while (i != parent[i]) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }

  // Returns the surviving root.
  std::int64_t unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    return a;
  }
};

}  // namespace patlas
