// Command-line front end: every pipeline stage as a subcommand, plus the
// synthetic ensemble generators and the held-out evaluation protocols.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patlas/atlas.hpp"
#include "patlas/io.hpp"
#include "patlas/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string input;
  std::string output;
  double gamma = 0.1;
  double cull = 0.01;
  int knn = 5;
  std::string kinds = "both";
  std::string k = "auto";
  long seed = 0;
  std::string threads = "auto";
  double persistence_threshold = 0.2;
};

patlas::MapKinds parse_kinds(const std::string& s) {
  if (s == "both") return {true, true};
  if (s == "minima") return {true, false};
  if (s == "maxima") return {false, true};
  patlas::fail_validation("BAD_KINDS", "unknown kinds '" + s + "' (both|minima|maxima)");
}

int parse_k(const std::string& s) {
  if (s == "auto") return 0;
  try {
    std::size_t pos = 0;
    int k = std::stoi(s, &pos);
    if (pos != s.size() || k <= 0) throw std::invalid_argument(s);
    return k;
  } catch (const std::exception&) {
    patlas::fail_validation("BAD_K", "k must be 'auto' or a positive integer, got '" + s + "'");
  }
}

int parse_threads(const std::string& s) {
  if (s == "auto") return 0;
  try {
    std::size_t pos = 0;
    int t = std::stoi(s, &pos);
    if (pos != s.size() || t <= 0) throw std::invalid_argument(s);
    return t;
  } catch (const std::exception&) {
    patlas::fail_validation("BAD_THREADS", "threads must be 'auto' or a positive integer");
  }
}

std::array<std::int64_t, 2> parse_dims(const std::string& s) {
  auto x = s.find('x');
  if (x == std::string::npos) patlas::fail_validation("BAD_DIMS", "dims must look like 128x128");
  try {
    std::int64_t a = std::stoll(s.substr(0, x));
    std::int64_t b = std::stoll(s.substr(x + 1));
    return {a, b};
  } catch (const std::exception&) {
    patlas::fail_validation("BAD_DIMS", "dims must look like 128x128");
  }
}

patlas::AtlasConfig atlas_config(const CommonOpts& opts) {
  patlas::AtlasConfig config;
  config.gamma = opts.gamma;
  config.cull = opts.cull;
  config.knn = opts.knn;
  config.kinds = parse_kinds(opts.kinds);
  config.k = parse_k(opts.k);
  config.seed = opts.seed;
  config.threads = parse_threads(opts.threads);
  return config;
}

void require_output(const CommonOpts& opts) {
  if (opts.output.empty()) patlas::fail_validation("BAD_ARGS", "--output is required");
  fs::create_directories(opts.output);
}

patlas::Ensemble load_input(const CommonOpts& opts) {
  if (opts.input.empty()) patlas::fail_validation("BAD_ARGS", "--input is required");
  return patlas::read_ensemble(opts.input);
}

void print_status(json j) {
  std::cout << j.dump() << "\n";
}

json timing_json(const patlas::StageTimings& t) {
  return json{{"pm", t.persistence_maps},
              {"dm", t.distance_matrix},
              {"e", t.embedding},
              {"c", t.clustering},
              {"mcp", t.mandatory}};
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* kind_label(patlas::PairKind k) {
  return k == patlas::PairKind::MinSaddle ? "min_saddle" : "saddle_max";
}

void write_prediction_csv(const patlas::PredictionReport& report, const std::vector<int>& member_ids,
                          const fs::path& path) {
  std::string out;
  for (std::size_t t = 0; t < report.per_member.size(); ++t) {
    for (const auto& e : report.per_member[t]) {
      out += std::to_string(member_ids[t]);
      out += ',';
      out += std::to_string(e.extremum);
      out += ',';
      out += kind_label(e.kind);
      out += ',';
      out += patlas::detail::fmt_g17(e.persistence_raw);
      out += ',';
      out += std::to_string(e.assigned_cluster);
      out += ',';
      out += e.hit ? std::to_string(e.region_id) : std::string("MISS");
      out += "\r\n";
    }
  }
  patlas::detail::write_file(path, out);
}

int cmd_synth(const CommonOpts& opts, const std::string& kind, const std::string& dims_text,
              int members, double jitter, double noise) {
  require_output(opts);
  auto dims = parse_dims(dims_text);
  patlas::SynthResult result;
  if (kind == "gaussians") {
    result = patlas::gen_gaussian_trends(
        patlas::three_trend_spec(dims, members, jitter, noise, static_cast<std::uint64_t>(opts.seed)));
  } else if (kind == "two-site") {
    if (members < 4 || members % 2 != 0)
      patlas::fail_validation("BAD_SPEC", "two-site needs an even member count >= 4");
    result = patlas::gen_two_site_trends(patlas::two_site_spec(
        dims, members / 2, jitter, noise, static_cast<std::uint64_t>(opts.seed)));
  } else if (kind == "fig3") {
    auto quartet = patlas::gen_fig3_quartet(dims, static_cast<std::uint64_t>(opts.seed));
    result.ensemble = patlas::make_ensemble(std::move(quartet));
    result.labels = {0, 1, 2, 3};
  } else {
    patlas::fail_validation("BAD_SPEC", "unknown synth kind '" + kind + "' (gaussians|fig3|two-site)");
  }
  auto manifest = patlas::write_ensemble(result.ensemble, opts.output, patlas::RawDtype::f64);
  patlas::write_ground_truth_csv(result.labels, fs::path(opts.output) / "ground_truth.csv");
  print_status({{"command", "synth"},
                {"kind", kind},
                {"n", result.ensemble.n()},
                {"manifest", manifest.string()}});
  return 0;
}

int cmd_diagram(const CommonOpts& opts) {
  require_output(opts);
  auto t0 = std::chrono::steady_clock::now();
  auto ensemble = load_input(opts);
  const int threads = parse_threads(opts.threads);
  std::vector<patlas::PersistenceDiagram> diagrams(ensemble.members.size());
  patlas::parallel_for(ensemble.members.size(), threads, [&](std::size_t i) {
    diagrams[i] = patlas::compute_diagram(ensemble.members[i]);
  });
  diagrams = patlas::normalize_diagrams(std::move(diagrams));
  for (const auto& d : diagrams) {
    std::string out;
    for (const auto& p : d.pairs) {
      out += kind_label(p.kind);
      out += ',';
      out += std::to_string(p.extremum_vertex);
      out += ',';
      out += std::to_string(p.paired_vertex);
      out += ',';
      out += patlas::detail::fmt_g17(p.birth);
      out += ',';
      out += patlas::detail::fmt_g17(p.death);
      out += ',';
      out += patlas::detail::fmt_g17(p.persistence_raw);
      out += ',';
      out += patlas::detail::fmt_g17(p.persistence);
      out += "\r\n";
    }
    char name[32];
    std::snprintf(name, sizeof(name), "diagram_%03d.csv", d.member_id);
    patlas::detail::write_file(fs::path(opts.output) / name, out);
  }
  print_status({{"command", "diagram"}, {"n", ensemble.n()}, {"timings_s", {{"pm", elapsed(t0)}}}});
  return 0;
}

int cmd_pmap(const CommonOpts& opts) {
  require_output(opts);
  auto t0 = std::chrono::steady_clock::now();
  auto ensemble = load_input(opts);
  patlas::MapConfig config{opts.gamma, opts.cull, parse_kinds(opts.kinds), parse_threads(opts.threads)};
  auto maps = patlas::compute_ensemble_maps(ensemble, config);
  for (const auto& m : maps.maps) {
    char name[32];
    std::snprintf(name, sizeof(name), "pmap_%03d.raw", m.member_id);
    patlas::write_field_raw(m.phi, fs::path(opts.output) / name, patlas::RawDtype::f64);
  }
  print_status({{"command", "pmap"}, {"n", ensemble.n()}, {"timings_s", {{"pm", elapsed(t0)}}}});
  return 0;
}

int cmd_distances(const CommonOpts& opts) {
  require_output(opts);
  auto t0 = std::chrono::steady_clock::now();
  auto ensemble = load_input(opts);
  const int threads = parse_threads(opts.threads);
  patlas::MapConfig config{opts.gamma, opts.cull, parse_kinds(opts.kinds), threads};
  auto maps = patlas::compute_ensemble_maps(ensemble, config);
  double pm = elapsed(t0);
  t0 = std::chrono::steady_clock::now();
  auto matrix = patlas::distance_matrix(maps.maps, threads);
  patlas::write_csv_matrix(matrix.entries, matrix.n, fs::path(opts.output) / "distances.csv");
  print_status({{"command", "distances"},
                {"n", ensemble.n()},
                {"timings_s", {{"pm", pm}, {"dm", elapsed(t0)}}}});
  return 0;
}

struct EmbeddingStage {
  patlas::DistanceMatrix matrix;
  patlas::SymmetricEigen eig;
  double pm = 0.0, dm = 0.0, e = 0.0;
};

EmbeddingStage run_embedding(const patlas::Ensemble& ensemble, const CommonOpts& opts) {
  EmbeddingStage stage;
  const int threads = parse_threads(opts.threads);
  auto t0 = std::chrono::steady_clock::now();
  patlas::MapConfig config{opts.gamma, opts.cull, parse_kinds(opts.kinds), threads};
  auto maps = patlas::compute_ensemble_maps(ensemble, config);
  stage.pm = elapsed(t0);
  t0 = std::chrono::steady_clock::now();
  stage.matrix = patlas::distance_matrix(maps.maps, threads);
  stage.dm = elapsed(t0);
  t0 = std::chrono::steady_clock::now();
  auto graph = patlas::knn_graph(stage.matrix, opts.knn);
  stage.eig = patlas::generalized_eigs(patlas::laplacian(graph));
  stage.e = elapsed(t0);
  return stage;
}

int cmd_embed(const CommonOpts& opts) {
  require_output(opts);
  auto ensemble = load_input(opts);
  auto stage = run_embedding(ensemble, opts);
  auto embedding = patlas::embed(stage.eig, ensemble.n() - 1, opts.knn);
  patlas::write_embedding_csv(embedding, fs::path(opts.output) / "embedding.csv");
  patlas::write_csv_column(embedding.eigenvalues, fs::path(opts.output) / "eigenvalues.csv");
  patlas::write_csv_column(embedding.eigengaps, fs::path(opts.output) / "eigengaps.csv");
  json status{{"command", "embed"},
              {"n", ensemble.n()},
              {"eigengaps", embedding.eigengaps},
              {"timings_s", {{"pm", stage.pm}, {"dm", stage.dm}, {"e", stage.e}}}};
  if (ensemble.n() >= 4) status["suggested_k"] = patlas::suggest_k(stage.eig.values);
  print_status(status);
  return 0;
}

int cmd_cluster(const CommonOpts& opts) {
  require_output(opts);
  auto ensemble = load_input(opts);
  const int k_flag = parse_k(opts.k);
  auto stage = run_embedding(ensemble, opts);
  auto t0 = std::chrono::steady_clock::now();
  int suggested = ensemble.n() >= 4 ? patlas::suggest_k(stage.eig.values) : -1;
  int k = k_flag > 0 ? k_flag : suggested;
  if (k <= 0) patlas::fail_validation("BAD_N", "automatic cluster count needs at least 4 members");
  auto space = patlas::embed(stage.eig, std::max(1, k - 1), opts.knn);
  auto clustering = patlas::cluster(space, k, opts.seed);
  patlas::write_clusters_csv(clustering.labels, fs::path(opts.output) / "clusters.csv");
  print_status({{"command", "cluster"},
                {"suggested_k", suggested},
                {"k_used", k},
                {"timings_s",
                 {{"pm", stage.pm}, {"dm", stage.dm}, {"e", stage.e}, {"c", elapsed(t0)}}}});
  return 0;
}

int cmd_atlas(const CommonOpts& opts) {
  require_output(opts);
  auto ensemble = load_input(opts);
  auto atlas = patlas::build_atlas(ensemble, atlas_config(opts));
  patlas::write_atlas(atlas, opts.output);
  print_status({{"command", "atlas"},
                {"suggested_k", atlas.suggested_k},
                {"k_used", atlas.clustering.k},
                {"eigengaps", atlas.embedding.eigengaps},
                {"timings_s", timing_json(atlas.timings)}});
  return 0;
}

int cmd_predict(const CommonOpts& opts) {
  require_output(opts);
  auto ensemble = load_input(opts);
  auto split = patlas::split_ensemble(ensemble, opts.seed);
  auto atlas = patlas::build_atlas(split.train, atlas_config(opts));
  auto report = patlas::predict(atlas, split.test, opts.persistence_threshold);
  write_prediction_csv(report, split.test_ids, fs::path(opts.output) / "prediction_report.csv");
  json status{{"command", "predict"},
              {"train", split.train.n()},
              {"test", split.test.size()},
              {"suggested_k", atlas.suggested_k},
              {"k_used", atlas.clustering.k},
              {"hits", report.hits},
              {"total", report.total},
              {"hit_rate", report.hit_rate},
              {"timings_s", timing_json(atlas.timings)}};
  patlas::detail::write_file(fs::path(opts.output) / "prediction_report.json", status.dump(2) + "\n");
  print_status(status);
  return 0;
}

int cmd_baseline(const CommonOpts& opts) {
  require_output(opts);
  auto ensemble = load_input(opts);
  auto split = patlas::split_ensemble(ensemble, opts.seed);
  auto baseline = patlas::baseline_convex_hulls(split.train, split.test, opts.persistence_threshold,
                                                opts.seed, opts.knn, parse_threads(opts.threads));
  write_prediction_csv(baseline.report, split.test_ids, fs::path(opts.output) / "baseline_report.csv");
  json hulls = json::array();
  for (std::size_t c = 0; c < baseline.regions.size(); ++c) {
    json polygon = json::array();
    for (const auto& p : baseline.regions[c].hull) polygon.push_back({p.x, p.y});
    hulls.push_back({{"cluster_id", c}, {"hull", polygon}});
  }
  patlas::detail::write_file(fs::path(opts.output) / "baseline_hulls.json", hulls.dump(2) + "\n");
  json status{{"command", "baseline"},
              {"train", split.train.n()},
              {"test", split.test.size()},
              {"k_used", baseline.clustering.k},
              {"hits", baseline.report.hits},
              {"total", baseline.report.total},
              {"hit_rate", baseline.report.hit_rate}};
  print_status(status);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persistence atlas pipeline for ensembles of scalar fields"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string synth_kind = "gaussians";
  std::string synth_dims = "128x128";
  int synth_members = 100;
  double synth_jitter = 0.03;
  double synth_noise = 0.03;

  auto add_common = [&](CLI::App* cmd, bool wants_input) {
    if (wants_input) cmd->add_option("--input", opts.input, "ensemble manifest (manifest.json)");
    cmd->add_option("--output", opts.output, "output directory");
    cmd->add_option("--gamma", opts.gamma, "kernel spread factor (default 0.1)");
    cmd->add_option("--cull", opts.cull, "minimum normalized persistence (default 0.01)");
    cmd->add_option("--knn", opts.knn, "nearest neighbor count (default 5)");
    cmd->add_option("--kinds", opts.kinds, "extrema used: both|minima|maxima");
    cmd->add_option("--k", opts.k, "cluster count or 'auto'");
    cmd->add_option("--seed", opts.seed, "deterministic seed (default 0)");
    cmd->add_option("--threads", opts.threads, "worker threads or 'auto'")->envname("PA_THREADS");
    cmd->add_option("--persistence-threshold", opts.persistence_threshold,
                    "qualifying persistence as a fraction of the field range (default 0.2)");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic ensemble");
  add_common(synth, false);
  synth->add_option("--kind", synth_kind, "gaussians|fig3|two-site");
  synth->add_option("--dims", synth_dims, "grid extents, e.g. 128x128");
  synth->add_option("--members", synth_members, "total member count");
  synth->add_option("--jitter", synth_jitter, "site jitter, fraction of extent");
  synth->add_option("--noise", synth_noise, "additive noise, fraction of amplitude");

  CLI::App* diagram = app.add_subcommand("diagram", "persistence diagrams per member");
  add_common(diagram, true);
  CLI::App* pmap = app.add_subcommand("pmap", "persistence maps per member");
  add_common(pmap, true);
  CLI::App* distances = app.add_subcommand("distances", "map distance matrix");
  add_common(distances, true);
  CLI::App* embedc = app.add_subcommand("embed", "spectral embedding");
  add_common(embedc, true);
  CLI::App* clusterc = app.add_subcommand("cluster", "spectral clustering");
  add_common(clusterc, true);
  CLI::App* atlasc = app.add_subcommand("atlas", "full pipeline");
  add_common(atlasc, true);
  CLI::App* predictc = app.add_subcommand("predict", "50/50 split, atlas prediction");
  add_common(predictc, true);
  CLI::App* baselinec = app.add_subcommand("baseline", "50/50 split, convex hull baseline");
  add_common(baselinec, true);

  try {
    app.parse(argc, argv);
    if (synth->parsed())
      return cmd_synth(opts, synth_kind, synth_dims, synth_members, synth_jitter, synth_noise);
    if (diagram->parsed()) return cmd_diagram(opts);
    if (pmap->parsed()) return cmd_pmap(opts);
    if (distances->parsed()) return cmd_distances(opts);
    if (embedc->parsed()) return cmd_embed(opts);
    if (clusterc->parsed()) return cmd_cluster(opts);
    if (atlasc->parsed()) return cmd_atlas(opts);
    if (predictc->parsed()) return cmd_predict(opts);
    if (baselinec->parsed()) return cmd_baseline(opts);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "ERROR:BAD_ARGS:" << e.what() << "\n";
    return 1;
  } catch (const patlas::error& e) {
    std::cerr << "ERROR:" << e.code() << ":" << e.what() << "\n";
    return e.kind() == patlas::error_kind::io ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR:INTERNAL:" << e.what() << "\n";
    return 2;
  }
  return 0;
}
