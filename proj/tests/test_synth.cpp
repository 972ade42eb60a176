#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "helpers.hpp"
#include "patlas/mandatory.hpp"
#include "patlas/map_space.hpp"
#include "patlas/synth.hpp"

using namespace patlas;

TEST_CASE("generation is bit-reproducible for a fixed spec and seed") {
  auto spec = three_trend_spec({48, 48}, 9, 0.03, 0.03, 7);
  auto a = gen_gaussian_trends(spec);
  auto b = gen_gaussian_trends(spec);
  REQUIRE(a.ensemble.n() == b.ensemble.n());
  for (int m = 0; m < a.ensemble.n(); ++m)
    CHECK(a.ensemble.members[m].values == b.ensemble.members[m].values);

  spec.seed = 8;
  auto c = gen_gaussian_trends(spec);
  CHECK(a.ensemble.members[0].values != c.ensemble.members[0].values);
}

TEST_CASE("three-trend spec distributes 100 members as 33/33/34") {
  auto spec = three_trend_spec({128, 128}, 100, 0.03, 0.03, 0);
  CHECK(spec.members_per_trend == std::vector<int>{33, 33, 34});
  CHECK(spec.trends.size() == 3);
  CHECK(spec.trends[0].sites.size() == 1);
  CHECK(spec.trends[1].sites.size() == 2);
  CHECK(spec.trends[2].sites.size() == 3);
}

TEST_CASE("labels follow the trend layout") {
  auto result = gen_gaussian_trends(three_trend_spec({32, 32}, 10, 0.02, 0.02, 1));
  REQUIRE(result.labels.size() == 10);
  CHECK(std::count(result.labels.begin(), result.labels.end(), 0) == 3);
  CHECK(std::count(result.labels.begin(), result.labels.end(), 1) == 3);
  CHECK(std::count(result.labels.begin(), result.labels.end(), 2) == 4);
  CHECK(std::is_sorted(result.labels.begin(), result.labels.end()));
}

TEST_CASE("zero jitter and noise collapse each trend to one field") {
  auto spec = three_trend_spec({32, 32}, 6, 0.0, 0.0, 3);
  auto result = gen_gaussian_trends(spec);
  MapConfig config;
  auto maps = compute_ensemble_maps(result.ensemble, config);
  auto matrix = distance_matrix(maps.maps);
  for (int x = 0; x < result.ensemble.n(); ++x)
    for (int y = 0; y < result.ensemble.n(); ++y) {
      if (result.labels[x] == result.labels[y])
        CHECK(matrix.at(x, y) == 0.0);
      else
        CHECK(matrix.at(x, y) > 0.0);
    }
}

TEST_CASE("dominant pairs per member equal the trend's site count") {
  auto result = gen_gaussian_trends(three_trend_spec({64, 64}, 9, 0.03, 0.03, 5));
  std::vector<PersistenceDiagram> diagrams;
  for (const auto& m : result.ensemble.members) diagrams.push_back(compute_diagram(m));
  diagrams = normalize_diagrams(diagrams);
  const std::size_t site_count[] = {1, 2, 3};
  for (int m = 0; m < result.ensemble.n(); ++m) {
    std::size_t dominant = 0;
    for (const auto& p : diagrams[m].pairs)
      if (p.kind == PairKind::SaddleMax && p.persistence >= 0.2) ++dominant;
    CHECK(dominant == site_count[result.labels[m]]);
  }
}

TEST_CASE("two-site trends never co-occur and split evenly") {
  auto result = gen_two_site_trends(two_site_spec({48, 48}, 6, 0.02, 0.02, 0));
  REQUIRE(result.ensemble.n() == 12);
  CHECK(std::count(result.labels.begin(), result.labels.end(), 0) == 6);
  CHECK(std::count(result.labels.begin(), result.labels.end(), 1) == 6);
  CHECK(appearance_probability(6, 12) == 0.5);

  // Exactly one dominant maximum per member, on its trend's half.
  auto g = result.ensemble.topology;
  for (int m = 0; m < 12; ++m) {
    const auto& f = result.ensemble.members[m];
    auto arg = std::max_element(f.values.begin(), f.values.end()) - f.values.begin();
    double x = static_cast<double>(delinearize(g, arg)[0]) / static_cast<double>(g.dims[0] - 1);
    if (result.labels[m] == 0)
      CHECK(x < 0.5);
    else
      CHECK(x > 0.5);
  }
}

TEST_CASE("generator rejects invalid specs") {
  SynthSpec spec;
  spec.trends = {TrendSpec{{{0.5, 0.5}}, {1.0}}};
  spec.members_per_trend = {4};
  CHECK_THROWS_AS(gen_gaussian_trends(spec), error);  // single trend

  auto ok = two_site_spec({32, 32}, 3, 0.0, 0.0, 0);
  ok.members_per_trend = {1, 1};
  CHECK_THROWS_AS(gen_gaussian_trends(ok), error);  // too few members

  CHECK_THROWS_AS(gen_fig3_quartet({32, 32}, 0), error);  // too small
}

TEST_CASE("quartet distances order differently in value space and map space") {
  auto quartet = gen_fig3_quartet({64, 64}, 0);
  REQUIRE(quartet.size() == 4);

  double raw1 = field_l2_distance(quartet[0].values, quartet[1].values);
  double raw2 = field_l2_distance(quartet[0].values, quartet[2].values);
  double raw3 = field_l2_distance(quartet[0].values, quartet[3].values);
  CHECK(raw3 < raw2);
  CHECK(raw2 < raw1);

  Ensemble e = make_ensemble(std::move(quartet));
  MapConfig config;
  config.kinds = MapKinds{false, true};
  auto maps = compute_ensemble_maps(e, config);
  double pm1 = field_l2_distance(maps.maps[0].phi, maps.maps[1].phi);
  double pm2 = field_l2_distance(maps.maps[0].phi, maps.maps[2].phi);
  double pm3 = field_l2_distance(maps.maps[0].phi, maps.maps[3].phi);
  CHECK(pm2 < pm1);
  CHECK(pm1 < pm3);
}
