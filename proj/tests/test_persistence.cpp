#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "patlas/persistence.hpp"

using namespace patlas;
using test_helpers::pair_multiset;

namespace {

ScalarFieldGrid column_profile_field(const std::vector<double>& profile, std::int64_t ny) {
  auto g = build_grid({static_cast<std::int64_t>(profile.size()), ny}, {1.0, 1.0}, {0.0, 0.0});
  std::vector<double> vals(g.vertex_count());
  for (std::int64_t j = 0; j < ny; ++j)
    for (std::int64_t i = 0; i < g.dims[0]; ++i) vals[i + g.dims[0] * j] = profile[i];
  return make_field(g, vals, 0);
}

std::multiset<std::pair<double, double>> birth_death_multiset(
    const std::vector<PersistencePair>& pairs) {
  std::multiset<std::pair<double, double>> out;
  for (const auto& p : pairs) out.insert({p.birth, p.death});
  return out;
}

}  // namespace

TEST_CASE("classify_vertex basic types") {
  auto g = build_grid({3, 3}, {1.0, 1.0}, {0.0, 0.0});
  std::vector<double> vals(9, 1.0);
  vals[linearize(g, {1, 1, 0})] = 0.0;
  CHECK(classify_vertex(make_field(g, vals, 0), linearize(g, {1, 1, 0})) == CriticalType::Minimum);

  vals[linearize(g, {1, 1, 0})] = 2.0;
  CHECK(classify_vertex(make_field(g, vals, 0), linearize(g, {1, 1, 0})) == CriticalType::Maximum);
}

TEST_CASE("classify_vertex saddle from a two-arc lower link") {
  auto g = build_grid({3, 3}, {1.0, 1.0}, {0.0, 0.0});
  // Lower neighbors (0,1) and (2,1) are not adjacent to each other, so the
  // lower link has two components; upper link splits symmetrically.
  std::vector<double> vals(9, 2.0);
  vals[linearize(g, {1, 1, 0})] = 1.0;
  vals[linearize(g, {0, 1, 0})] = 0.0;
  vals[linearize(g, {2, 1, 0})] = 0.0;
  CHECK(classify_vertex(make_field(g, vals, 0), linearize(g, {1, 1, 0})) == CriticalType::Saddle);
}

TEST_CASE("classify_vertex degenerate multi-saddle") {
  auto g = build_grid({3, 3}, {1.0, 1.0}, {0.0, 0.0});
  // Alternate low/high around the 6-cycle link of the center.
  std::vector<double> vals(9, 0.0);
  auto set = [&](std::int64_t i, std::int64_t j, double v) { vals[linearize(g, {i, j, 0})] = v; };
  set(1, 1, 1.0);
  set(0, 0, 0.0);
  set(1, 0, 2.0);
  set(2, 1, 0.0);
  set(2, 2, 2.0);
  set(1, 2, 0.0);
  set(0, 1, 2.0);
  auto type = classify_vertex(make_field(g, vals, 0), linearize(g, {1, 1, 0}));
  CHECK(type == CriticalType::Degenerate);
  CHECK(is_saddle_kind(type));
}

TEST_CASE("classify_vertex regular interior vertex") {
  auto g = build_grid({4, 4}, {1.0, 1.0}, {0.0, 0.0});
  std::vector<double> vals(16);
  for (vertex_id v = 0; v < 16; ++v) vals[v] = static_cast<double>(delinearize(g, v)[0]);
  CHECK(classify_vertex(make_field(g, vals, 0), linearize(g, {1, 1, 0})) == CriticalType::Regular);
}

TEST_CASE("min-saddle pairs of a two-basin column profile") {
  // Basin born at value 1 dies at the value-2 saddle; the global minimum 0
  // pairs against the field range.
  auto f = column_profile_field({1.0, 2.0, 0.0, 5.0, 5.0}, 3);
  auto pairs = extremum_pairs(f, PairKind::MinSaddle);
  REQUIRE(pairs.size() == 2);
  auto bd = birth_death_multiset(pairs);
  CHECK(bd.count({1.0, 2.0}) == 1);
  CHECK(bd.count({0.0, 5.0}) == 1);
  for (const auto& p : pairs) CHECK(p.persistence_raw == p.death - p.birth);
}

TEST_CASE("min-saddle pairs of a three-basin column profile") {
  // Elder rule: basins born at 2 and 1 both die at value-5 merges; the
  // global minimum 0 survives and pairs against the range.
  auto f = column_profile_field({0.0, 5.0, 2.0, 5.0, 1.0}, 3);
  auto pairs = extremum_pairs(f, PairKind::MinSaddle);
  REQUIRE(pairs.size() == 3);
  auto bd = birth_death_multiset(pairs);
  CHECK(bd.count({2.0, 5.0}) == 1);
  CHECK(bd.count({1.0, 5.0}) == 1);
  CHECK(bd.count({0.0, 5.0}) == 1);
  CHECK(pair_multiset(pairs) == pair_multiset(brute_force_pairs(f, PairKind::MinSaddle)));
}

TEST_CASE("strictly monotone field has only the global pair") {
  auto g = build_grid({6, 4}, {1.0, 1.0}, {0.0, 0.0});
  std::vector<double> vals(g.vertex_count());
  for (vertex_id v = 0; v < g.vertex_count(); ++v) vals[v] = static_cast<double>(v) * 0.5;
  auto f = make_field(g, vals, 0);
  auto pairs = extremum_pairs(f, PairKind::MinSaddle);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].extremum_vertex == 0);
  CHECK(pairs[0].paired_vertex == g.vertex_count() - 1);
  CHECK(pairs[0].persistence_raw == Catch::Approx((g.vertex_count() - 1) * 0.5));
}

TEST_CASE("constant field yields one zero-persistence pair") {
  auto g = build_grid({4, 4}, {1.0, 1.0}, {0.0, 0.0});
  auto f = make_field(g, std::vector<double>(16, 2.5), 0);
  for (auto kind : {PairKind::MinSaddle, PairKind::SaddleMax}) {
    auto pairs = brute_force_pairs(f, kind);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].persistence_raw == 0.0);
    CHECK(pair_multiset(extremum_pairs(f, kind)) == pair_multiset(pairs));
  }
}

TEST_CASE("sweep matches the brute-force oracle on random fields") {
  auto g = build_grid({8, 8}, {1.0, 1.0}, {0.0, 0.0});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto f = test_helpers::random_field(g, seed);
    for (auto kind : {PairKind::MinSaddle, PairKind::SaddleMax}) {
      CHECK(pair_multiset(extremum_pairs(f, kind)) == pair_multiset(brute_force_pairs(f, kind)));
    }
  }
}

TEST_CASE("sweep matches the oracle on plateau-heavy fields") {
  auto g = build_grid({8, 8}, {1.0, 1.0}, {0.0, 0.0});
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    auto f = test_helpers::random_plateau_field(g, seed, 3);
    for (auto kind : {PairKind::MinSaddle, PairKind::SaddleMax}) {
      CHECK(pair_multiset(extremum_pairs(f, kind)) == pair_multiset(brute_force_pairs(f, kind)));
    }
  }
}

TEST_CASE("sweep matches the oracle on a small 3D grid") {
  auto g = build_grid({5, 4, 4}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    auto f = test_helpers::random_field(g, seed);
    for (auto kind : {PairKind::MinSaddle, PairKind::SaddleMax}) {
      CHECK(pair_multiset(extremum_pairs(f, kind)) == pair_multiset(brute_force_pairs(f, kind)));
    }
  }
}

TEST_CASE("brute force guard rejects large grids") {
  auto g = build_grid({101, 101}, {1.0, 1.0}, {0.0, 0.0});
  std::vector<double> vals(g.vertex_count(), 0.0);
  vals[0] = 1.0;
  CHECK_THROWS_AS(brute_force_pairs(make_field(g, vals, 0), PairKind::MinSaddle), error);
}

TEST_CASE("negation duality is exact") {
  auto g = build_grid({8, 8}, {1.0, 1.0}, {0.0, 0.0});
  for (std::uint64_t seed = 7; seed < 12; ++seed) {
    auto f = test_helpers::random_field(g, seed);
    std::vector<double> neg(f.values.size());
    for (std::size_t v = 0; v < neg.size(); ++v) neg[v] = -f.values[v];
    auto nf = make_field(g, neg, 0);

    auto max_pairs = extremum_pairs(f, PairKind::SaddleMax);
    auto min_of_neg = extremum_pairs(nf, PairKind::MinSaddle);
    REQUIRE(max_pairs.size() == min_of_neg.size());
    auto key = [](const PersistencePair& p) {
      return std::make_tuple(p.extremum_vertex, p.paired_vertex);
    };
    std::vector<std::tuple<vertex_id, vertex_id>> a, b;
    for (const auto& p : max_pairs) a.push_back(key(p));
    for (const auto& p : min_of_neg) b.push_back(key(p));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    // birth/death negate and swap, exactly.
    std::sort(max_pairs.begin(), max_pairs.end(),
              [&](const auto& x, const auto& y) { return key(x) < key(y); });
    std::sort(min_of_neg.begin(), min_of_neg.end(),
              [&](const auto& x, const auto& y) { return key(x) < key(y); });
    for (std::size_t i = 0; i < max_pairs.size(); ++i) {
      CHECK(max_pairs[i].birth == -min_of_neg[i].death);
      CHECK(max_pairs[i].death == -min_of_neg[i].birth);
    }
  }
}

TEST_CASE("monotone transforms preserve pairing structure") {
  auto g = build_grid({8, 8}, {1.0, 1.0}, {0.0, 0.0});
  auto f = test_helpers::random_field(g, 77);
  std::vector<double> transformed(f.values.size());
  auto monotone = [](double t) { return t * t * t + 2.0 * t; };
  for (std::size_t v = 0; v < transformed.size(); ++v) transformed[v] = monotone(f.values[v]);
  auto tf = make_field(g, transformed, 0);

  for (vertex_id v = 0; v < g.vertex_count(); ++v)
    CHECK(classify_vertex(f, v) == classify_vertex(tf, v));

  for (auto kind : {PairKind::MinSaddle, PairKind::SaddleMax}) {
    auto base = extremum_pairs(f, kind);
    auto mapped = extremum_pairs(tf, kind);
    REQUIRE(base.size() == mapped.size());
    auto key = [](const PersistencePair& p) {
      return std::make_pair(p.extremum_vertex, p.paired_vertex);
    };
    std::sort(base.begin(), base.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
    std::sort(mapped.begin(), mapped.end(),
              [&](const auto& x, const auto& y) { return key(x) < key(y); });
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(key(base[i]) == key(mapped[i]));
      CHECK(mapped[i].persistence_raw ==
            Catch::Approx(monotone(base[i].death) - monotone(base[i].birth)).epsilon(1e-12));
    }
  }
}

TEST_CASE("min-saddle pair count equals classified minima") {
  auto g = build_grid({8, 8}, {1.0, 1.0}, {0.0, 0.0});
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    auto f = seed % 2 == 0 ? test_helpers::random_field(g, seed)
                           : test_helpers::random_plateau_field(g, seed, 3);
    int minima = 0;
    for (vertex_id v = 0; v < g.vertex_count(); ++v)
      if (classify_vertex(f, v) == CriticalType::Minimum) ++minima;
    CHECK(static_cast<int>(extremum_pairs(f, PairKind::MinSaddle).size()) == minima);
  }
}

TEST_CASE("saddle-max pair count equals classified maxima on tie-free fields") {
  auto g = build_grid({8, 8}, {1.0, 1.0}, {0.0, 0.0});
  for (std::uint64_t seed = 40; seed < 48; ++seed) {
    auto f = test_helpers::random_field(g, seed);
    int maxima = 0;
    for (vertex_id v = 0; v < g.vertex_count(); ++v)
      if (classify_vertex(f, v) == CriticalType::Maximum) ++maxima;
    CHECK(static_cast<int>(extremum_pairs(f, PairKind::SaddleMax).size()) == maxima);
  }
}

TEST_CASE("diagram has matched global pairs") {
  auto g = build_grid({8, 8}, {1.0, 1.0}, {0.0, 0.0});
  auto f = test_helpers::random_field(g, 3);
  auto d = compute_diagram(f);
  auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  CHECK(d.field_range == Catch::Approx(*hi - *lo));
  int global_min_pairs = 0, global_max_pairs = 0;
  for (const auto& p : d.pairs) {
    if (p.persistence_raw == d.field_range) {
      if (p.kind == PairKind::MinSaddle) {
        ++global_min_pairs;
        CHECK(f.values[p.extremum_vertex] == *lo);
      } else {
        ++global_max_pairs;
        CHECK(f.values[p.extremum_vertex] == *hi);
      }
    }
  }
  CHECK(global_min_pairs == 1);
  CHECK(global_max_pairs == 1);
}

TEST_CASE("normalization divides by the ensemble-wide maximum") {
  PersistenceDiagram a, b;
  a.member_id = 0;
  b.member_id = 1;
  PersistencePair p;
  p.birth = 0.0;
  p.death = 2.0;
  p.persistence_raw = 2.0;
  a.pairs.push_back(p);
  p.death = 4.0;
  p.persistence_raw = 4.0;
  b.pairs.push_back(p);
  auto normalized = normalize_diagrams({a, b});
  CHECK(normalized[0].pairs[0].persistence == Catch::Approx(0.5));
  CHECK(normalized[1].pairs[0].persistence == Catch::Approx(1.0));
  CHECK(normalized[0].normalized);

  auto solo = normalize_diagrams({a});
  CHECK(solo[0].pairs[0].persistence == Catch::Approx(1.0));
}

TEST_CASE("normalization is invariant under value scaling") {
  auto g = build_grid({6, 6}, {1.0, 1.0}, {0.0, 0.0});
  std::vector<PersistenceDiagram> base, scaled;
  for (int m = 0; m < 3; ++m) {
    auto f = test_helpers::random_field(g, 900 + m, m);
    base.push_back(compute_diagram(f));
    std::vector<double> tripled(f.values.size());
    for (std::size_t v = 0; v < tripled.size(); ++v) tripled[v] = 3.0 * f.values[v];
    scaled.push_back(compute_diagram(make_field(g, tripled, m)));
  }
  auto nb = normalize_diagrams(base);
  auto ns = normalize_diagrams(scaled);
  for (std::size_t m = 0; m < nb.size(); ++m) {
    REQUIRE(nb[m].pairs.size() == ns[m].pairs.size());
    for (std::size_t i = 0; i < nb[m].pairs.size(); ++i)
      CHECK(nb[m].pairs[i].persistence == Catch::Approx(ns[m].pairs[i].persistence).epsilon(1e-12));
  }
}

TEST_CASE("all-constant ensemble cannot be normalized") {
  auto g = build_grid({3, 3}, {1.0, 1.0}, {0.0, 0.0});
  auto f = make_field(g, std::vector<double>(9, 1.0), 0);
  CHECK_THROWS_AS(normalize_diagrams({compute_diagram(f)}), error);
}
