#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "patlas/error.hpp"
#include "patlas/grid.hpp"
#include "patlas/parallel.hpp"
#include "patlas/rng.hpp"

namespace patlas {

enum class SynthKind { GaussianTrends, Fig3Quartet, TwoSiteTrends };

/// One trend: a fixed layout of Gaussian bump sites (normalized axis
/// coordinates in [0,1]^2) with per-site amplitudes.
struct TrendSpec {
  std::vector<std::array<double, 2>> sites;
  std::vector<double> amplitudes;
};

struct SynthSpec {
  SynthKind kind = SynthKind::GaussianTrends;
  std::array<std::int64_t, 2> dims{128, 128};
  std::vector<TrendSpec> trends;
  std::vector<int> members_per_trend;
  double jitter_sigma = 0.03;  // per-axis site jitter, uniform in [-j, +j], fraction of extent
  double noise_amp = 0.03;     // additive per-vertex noise, uniform, fraction of max amplitude
  double bump_sigma = 0.07;    // Gaussian footprint, fraction of extent
  std::uint64_t seed = 0;
};

struct SynthResult {
  Ensemble ensemble;
  std::vector<int> labels;  // ground-truth trend index per member
};

namespace detail {

inline GridTopology synth_topology(const std::array<std::int64_t, 2>& dims) {
  return build_grid({dims[0], dims[1]}, {1.0, 1.0}, {0.0, 0.0});
}

inline void add_bump(std::vector<double>& values, const GridTopology& topo, double cx, double cy,
                     double amp, double sigma) {
  const std::int64_t nx = topo.dims[0], ny = topo.dims[1];
  const double sx = 1.0 / static_cast<double>(nx - 1);
  const double sy = 1.0 / static_cast<double>(ny - 1);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::int64_t j = 0; j < ny; ++j) {
    const double dy = static_cast<double>(j) * sy - cy;
    for (std::int64_t i = 0; i < nx; ++i) {
      const double dx = static_cast<double>(i) * sx - cx;
      values[i + nx * j] += amp * std::exp(-(dx * dx + dy * dy) * inv);
    }
  }
}

}  // namespace detail

/// Each member is the sum of its trend's bumps, every site independently
/// jittered, plus bounded uniform noise. Per-member RNG substreams keyed by
/// (seed, member id) make generation order-independent and reproducible.
inline SynthResult gen_gaussian_trends(const SynthSpec& spec) {
  if (spec.trends.size() < 2) fail_validation("BAD_SPEC", "need at least 2 trends");
  if (spec.members_per_trend.size() != spec.trends.size())
    fail_validation("BAD_SPEC", "members_per_trend must have one entry per trend");
  for (int c : spec.members_per_trend)
    if (c < 2) fail_validation("BAD_SPEC", "each trend needs at least 2 members");
  for (const auto& t : spec.trends) {
    if (t.sites.empty() || t.sites.size() != t.amplitudes.size())
      fail_validation("BAD_SPEC", "each trend needs matching sites and amplitudes");
  }
  if (!(spec.bump_sigma > 0.0)) fail_validation("BAD_SPEC", "bump_sigma must be positive");

  const GridTopology topo = detail::synth_topology(spec.dims);
  double max_amp = 0.0;
  for (const auto& t : spec.trends)
    for (double a : t.amplitudes) max_amp = std::max(max_amp, a);
  const double noise = spec.noise_amp * max_amp;

  int total = 0;
  std::vector<int> labels;
  for (std::size_t t = 0; t < spec.trends.size(); ++t) {
    for (int i = 0; i < spec.members_per_trend[t]; ++i) labels.push_back(static_cast<int>(t));
    total += spec.members_per_trend[t];
  }

  std::vector<ScalarFieldGrid> members(total);
  parallel_for(static_cast<std::size_t>(total), 0, [&](std::size_t m) {
    const TrendSpec& trend = spec.trends[labels[m]];
    SplitMix64 rng = SplitMix64::substream(spec.seed, m);
    std::vector<double> values(topo.vertex_count(), 0.0);
    for (std::size_t s = 0; s < trend.sites.size(); ++s) {
      double jx = rng.uniform(-spec.jitter_sigma, spec.jitter_sigma);
      double jy = rng.uniform(-spec.jitter_sigma, spec.jitter_sigma);
      detail::add_bump(values, topo, trend.sites[s][0] + jx, trend.sites[s][1] + jy,
                       trend.amplitudes[s], spec.bump_sigma);
    }
    if (noise > 0.0)
      for (double& v : values) v += rng.uniform(-noise, noise);
    members[m] = make_field(topo, std::move(values), static_cast<int>(m));
  });

  return SynthResult{make_ensemble(std::move(members)), std::move(labels)};
}

/// Canonical three-trend layout (1, 2 and 3 bump sites) used by the larger
/// experiments; members split as evenly as possible across trends.
inline SynthSpec three_trend_spec(std::array<std::int64_t, 2> dims, int total_members,
                                  double jitter, double noise, std::uint64_t seed) {
  if (total_members < 6) fail_validation("BAD_SPEC", "three trends need at least 6 members");
  SynthSpec spec;
  spec.kind = SynthKind::GaussianTrends;
  spec.dims = dims;
  spec.jitter_sigma = jitter;
  spec.noise_amp = noise;
  spec.seed = seed;
  spec.trends = {
      TrendSpec{{{0.30, 0.30}}, {1.0}},
      TrendSpec{{{0.70, 0.30}, {0.30, 0.70}}, {1.0, 1.0}},
      TrendSpec{{{0.70, 0.70}, {0.50, 0.20}, {0.20, 0.50}}, {1.0, 1.0, 1.0}},
  };
  const int t = static_cast<int>(spec.trends.size());
  spec.members_per_trend.assign(t, total_members / t);
  for (int i = t - total_members % t; i < t; ++i) ++spec.members_per_trend[i];
  return spec;
}

/// Two trends whose single bump sites never co-occur in one member.
inline SynthSpec two_site_spec(std::array<std::int64_t, 2> dims, int members_per_trend,
                               double jitter, double noise, std::uint64_t seed) {
  SynthSpec spec;
  spec.kind = SynthKind::TwoSiteTrends;
  spec.dims = dims;
  spec.jitter_sigma = jitter;
  spec.noise_amp = noise;
  spec.seed = seed;
  spec.trends = {
      TrendSpec{{{0.30, 0.50}}, {1.0}},
      TrendSpec{{{0.70, 0.50}}, {1.0}},
  };
  spec.members_per_trend = {members_per_trend, members_per_trend};
  return spec;
}

inline SynthResult gen_two_site_trends(const SynthSpec& spec) {
  if (spec.trends.size() != 2) fail_validation("BAD_SPEC", "two-site generator needs exactly 2 trends");
  for (const auto& t : spec.trends)
    if (t.sites.size() != 1) fail_validation("BAD_SPEC", "two-site trends carry one site each");
  if (spec.trends[0].sites[0] == spec.trends[1].sites[0])
    fail_validation("BAD_SPEC", "two-site trends need distinct site regions");
  return gen_gaussian_trends(spec);
}

/// Four-member family on a shared two-hill base: member 1 adds
/// high-frequency noise, member 2 a planar slope, member 3 one extra narrow
/// salient hill. Amplitudes are fixed so that the plain value-space L2
/// distance from member 0 orders them 3 < 2 < 1 while the persistence-map
/// distance orders them 2 < 1 < 3.
inline std::vector<ScalarFieldGrid> gen_fig3_quartet(std::array<std::int64_t, 2> dims,
                                                     std::uint64_t seed) {
  if (dims[0] < 64 || dims[1] < 64)
    fail_validation("BAD_DIMS", "quartet generator needs at least a 64x64 grid");
  const GridTopology topo = detail::synth_topology(dims);
  const std::int64_t nx = topo.dims[0], ny = topo.dims[1];

  // Snap centers to grid vertices so the narrow extra hill peaks exactly at
  // a vertex.
  auto snap = [&](double cx, double cy) {
    double ix = std::round(cx * static_cast<double>(nx - 1)) / static_cast<double>(nx - 1);
    double iy = std::round(cy * static_cast<double>(ny - 1)) / static_cast<double>(ny - 1);
    return std::array<double, 2>{ix, iy};
  };
  const auto hill_a = snap(0.32, 0.48);
  const auto hill_b = snap(0.70, 0.52);
  const auto hill_extra = snap(0.50, 0.80);
  constexpr double kNoiseAmp = 0.045;
  constexpr double kSlope = 0.062;
  constexpr double kExtraAmp = 0.80;
  constexpr double kExtraSigma = 0.009;

  std::vector<double> base(topo.vertex_count(), 0.0);
  detail::add_bump(base, topo, hill_a[0], hill_a[1], 1.0, 0.10);
  detail::add_bump(base, topo, hill_b[0], hill_b[1], 0.85, 0.10);

  std::vector<ScalarFieldGrid> quartet;
  quartet.push_back(make_field(topo, base, 0));

  std::vector<double> noisy = base;
  SplitMix64 rng = SplitMix64::substream(seed, 1);
  for (double& v : noisy) v += rng.uniform(-kNoiseAmp, kNoiseAmp);
  quartet.push_back(make_field(topo, std::move(noisy), 1));

  std::vector<double> sloped = base;
  const double sx = 1.0 / static_cast<double>(nx - 1);
  for (std::int64_t j = 0; j < ny; ++j)
    for (std::int64_t i = 0; i < nx; ++i)
      sloped[i + nx * j] += kSlope * (static_cast<double>(i) * sx - 0.5);
  quartet.push_back(make_field(topo, std::move(sloped), 2));

  std::vector<double> extra = base;
  detail::add_bump(extra, topo, hill_extra[0], hill_extra[1], kExtraAmp, kExtraSigma);
  quartet.push_back(make_field(topo, std::move(extra), 3));

  return quartet;
}

}  // namespace patlas
