#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "patlas/atlas.hpp"
#include "patlas/error.hpp"
#include "patlas/grid.hpp"

namespace patlas {

enum class RawDtype { f32, f64 };

inline const char* dtype_name(RawDtype t) { return t == RawDtype::f32 ? "f32" : "f64"; }

inline std::size_t dtype_size(RawDtype t) { return t == RawDtype::f32 ? 4 : 8; }

inline RawDtype parse_dtype(const std::string& s) {
  if (s == "f32") return RawDtype::f32;
  if (s == "f64") return RawDtype::f64;
  fail_validation("BAD_DTYPE", "unknown dtype '" + s + "' (expected f32 or f64)");
}

namespace detail {

// All blobs are little-endian regardless of host byte order.
inline void put_u32_le(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
}

inline void put_u64_le(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  std::uint32_t x = 0;
  for (int i = 3; i >= 0; --i) x = (x << 8) | p[i];
  return x;
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | p[i];
  return x;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail_io("IO", "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail_io("IO", "write failed for '" + path.string() + "'");
}

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("MISSING_FILE", "cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

inline std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_field_raw(const std::vector<double>& values, const std::filesystem::path& path,
                            RawDtype dtype) {
  std::string bytes;
  bytes.reserve(values.size() * dtype_size(dtype));
  for (double v : values) {
    if (dtype == RawDtype::f64)
      detail::put_u64_le(bytes, std::bit_cast<std::uint64_t>(v));
    else
      detail::put_u32_le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  detail::write_file(path, bytes);
}

inline void write_field_raw(const ScalarFieldGrid& field, const std::filesystem::path& path,
                            RawDtype dtype) {
  write_field_raw(field.values, path, dtype);
}

inline void write_labels_raw(const std::vector<std::int32_t>& labels,
                             const std::filesystem::path& path) {
  std::string bytes;
  bytes.reserve(labels.size() * 4);
  for (std::int32_t v : labels) detail::put_u32_le(bytes, static_cast<std::uint32_t>(v));
  detail::write_file(path, bytes);
}

struct EnsembleManifest {
  std::vector<std::int64_t> dims;
  std::vector<double> spacing;
  std::vector<double> origin;
  RawDtype dtype = RawDtype::f64;
  std::vector<std::pair<int, std::string>> members;  // (id, relative path)
};

inline void write_manifest(const EnsembleManifest& manifest, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "patlas-ensemble";
  j["byte_order"] = "little-endian";
  j["dims"] = manifest.dims;
  j["spacing"] = manifest.spacing;
  j["origin"] = manifest.origin;
  j["dtype"] = dtype_name(manifest.dtype);
  j["members"] = nlohmann::json::array();
  for (const auto& [id, rel] : manifest.members) j["members"].push_back({{"id", id}, {"path", rel}});
  detail::write_file(path, j.dump(2) + "\n");
}

/// Writes manifest.json plus one little-endian blob per member into dir.
inline std::filesystem::path write_ensemble(const Ensemble& ensemble,
                                            const std::filesystem::path& dir, RawDtype dtype) {
  std::filesystem::create_directories(dir);
  EnsembleManifest manifest;
  for (int a = 0; a < ensemble.topology.dim; ++a) {
    manifest.dims.push_back(ensemble.topology.dims[a]);
    manifest.spacing.push_back(ensemble.topology.spacing[a]);
    manifest.origin.push_back(ensemble.topology.origin[a]);
  }
  manifest.dtype = dtype;
  for (const auto& member : ensemble.members) {
    char name[32];
    std::snprintf(name, sizeof(name), "member_%03d.raw", member.member_id);
    write_field_raw(member, dir / name, dtype);
    manifest.members.emplace_back(member.member_id, name);
  }
  auto path = dir / "manifest.json";
  write_manifest(manifest, path);
  return path;
}

inline Ensemble read_ensemble(const std::filesystem::path& manifest_path) {
  auto bytes = detail::read_file(manifest_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    fail_io("BAD_MANIFEST", "cannot parse '" + manifest_path.string() + "': " + e.what());
  }
  std::vector<std::int64_t> dims = j.at("dims").get<std::vector<std::int64_t>>();
  std::vector<double> spacing = j.at("spacing").get<std::vector<double>>();
  std::vector<double> origin = j.at("origin").get<std::vector<double>>();
  RawDtype dtype = parse_dtype(j.at("dtype").get<std::string>());
  GridTopology topo = build_grid(dims, spacing, origin);
  const std::size_t vcount = static_cast<std::size_t>(topo.vertex_count());

  const auto base = manifest_path.parent_path();
  std::vector<ScalarFieldGrid> members;
  int position = 0;
  for (const auto& entry : j.at("members")) {
    const int id = entry.at("id").get<int>();
    if (id != position)
      fail_validation("NONCONTIGUOUS_IDS", "member at position " + std::to_string(position) +
                                               " has id " + std::to_string(id) +
                                               "; ids must be contiguous from 0");
    const std::filesystem::path blob = base / entry.at("path").get<std::string>();
    std::error_code ec;
    const auto size = std::filesystem::file_size(blob, ec);
    if (ec) fail_io("MISSING_FILE", "member " + std::to_string(id) + ": cannot stat '" + blob.string() + "'");
    if (size != vcount * dtype_size(dtype))
      fail_io("SIZE_MISMATCH", "member " + std::to_string(id) + ": '" + blob.string() + "' is " +
                                   std::to_string(size) + " bytes, expected " +
                                   std::to_string(vcount * dtype_size(dtype)));
    auto blob_bytes = detail::read_file(blob);
    std::vector<double> values(vcount);
    if (dtype == RawDtype::f64) {
      for (std::size_t v = 0; v < vcount; ++v)
        values[v] = std::bit_cast<double>(detail::get_u64_le(blob_bytes.data() + 8 * v));
    } else {
      for (std::size_t v = 0; v < vcount; ++v)
        values[v] = static_cast<double>(
            std::bit_cast<float>(detail::get_u32_le(blob_bytes.data() + 4 * v)));
    }
    members.push_back(make_field(topo, std::move(values), id));
    ++position;
  }
  return make_ensemble(std::move(members));
}

/// RFC-4180: comma separated, CRLF line endings, 17 significant digits
/// (doubles round-trip exactly).
inline void write_csv_matrix(const std::vector<double>& entries, int n,
                             const std::filesystem::path& path) {
  std::string out;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (y) out += ',';
      out += detail::fmt_g17(entries[static_cast<std::size_t>(x) * n + y]);
    }
    out += "\r\n";
  }
  detail::write_file(path, out);
}

inline void write_csv_column(const std::vector<double>& values, const std::filesystem::path& path) {
  std::string out;
  for (double v : values) {
    out += detail::fmt_g17(v);
    out += "\r\n";
  }
  detail::write_file(path, out);
}

inline std::vector<std::vector<double>> read_csv_matrix(const std::filesystem::path& path) {
  auto bytes = detail::read_file(path);
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string cell;
  auto flush_cell = [&] {
    if (!cell.empty()) {
      row.push_back(std::strtod(cell.c_str(), nullptr));
      cell.clear();
    }
  };
  for (unsigned char c : bytes) {
    if (c == ',') {
      flush_cell();
    } else if (c == '\n' || c == '\r') {
      flush_cell();
      if (!row.empty()) rows.push_back(std::move(row));
      row.clear();
    } else {
      cell.push_back(static_cast<char>(c));
    }
  }
  flush_cell();
  if (!row.empty()) rows.push_back(std::move(row));
  return rows;
}

/// 16-bit grayscale PGM (P5, big-endian samples as the format requires),
/// linear field min -> 0, max -> 65535, ties to even. A constant field
/// rasterizes to all zeros.
inline void write_pgm(const ScalarFieldGrid& field, const std::filesystem::path& path) {
  if (field.topology.dim != 2) fail_validation("BAD_DIMS", "PGM export is 2D only");
  const std::int64_t nx = field.topology.dims[0], ny = field.topology.dims[1];
  auto [lo_it, hi_it] = std::minmax_element(field.values.begin(), field.values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::string out = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n65535\n";
  for (std::int64_t j = 0; j < ny; ++j) {
    for (std::int64_t i = 0; i < nx; ++i) {
      double v = (field.values[i + nx * j] - lo) * scale;
      auto pixel = static_cast<std::uint16_t>(std::nearbyint(v));
      out.push_back(static_cast<char>((pixel >> 8) & 0xFF));
      out.push_back(static_cast<char>(pixel & 0xFF));
    }
  }
  detail::write_file(path, out);
}

inline void write_ground_truth_csv(const std::vector<int>& labels,
                                   const std::filesystem::path& path) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(labels[i]) + "\r\n";
  detail::write_file(path, out);
}

inline void write_clusters_csv(const std::vector<int>& labels, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(labels[i]) + "\r\n";
  detail::write_file(path, out);
}

inline void write_embedding_csv(const SpectralEmbedding& embedding,
                                const std::filesystem::path& path) {
  std::string out;
  for (std::size_t x = 0; x < embedding.coords.size(); ++x) {
    out += std::to_string(x);
    for (double c : embedding.coords[x]) {
      out += ',';
      out += detail::fmt_g17(c);
    }
    out += "\r\n";
  }
  detail::write_file(path, out);
}

namespace detail {

inline const char* kind_name(CriticalType t) {
  return t == CriticalType::Minimum ? "minimum" : "maximum";
}

}  // namespace detail

/// Emits every atlas artifact into dir plus an atlas.json index describing
/// each file (dims, dtype, byte order).
inline void write_atlas(const Atlas& atlas, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_labels_raw(atlas.label_min, dir / "labels_min.raw");
  write_labels_raw(atlas.label_max, dir / "labels_max.raw");
  auto write_f32 = [&](const std::vector<double>& values, const std::filesystem::path& path) {
    std::string bytes;
    bytes.reserve(values.size() * 4);
    for (double v : values)
      detail::put_u32_le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    detail::write_file(path, bytes);
  };
  write_f32(atlas.likelihood_min, dir / "likelihood_min.raw");
  write_f32(atlas.likelihood_max, dir / "likelihood_max.raw");
  write_csv_matrix(atlas.distances.entries, atlas.distances.n, dir / "distances.csv");
  write_csv_column(atlas.embedding.eigenvalues, dir / "eigenvalues.csv");
  write_csv_column(atlas.embedding.eigengaps, dir / "eigengaps.csv");
  write_embedding_csv(atlas.embedding, dir / "embedding.csv");
  write_clusters_csv(atlas.clustering.labels, dir / "clusters.csv");

  nlohmann::json summary;
  summary["n"] = atlas.n;
  summary["k"] = atlas.clustering.k;
  summary["suggested_k"] = atlas.suggested_k;
  summary["clusters"] = nlohmann::json::array();
  for (const auto& s : atlas.summaries) {
    nlohmann::json c;
    c["cluster_id"] = s.cluster_id;
    c["size"] = s.member_ids.size();
    c["appearance_probability"] = s.appearance_probability;
    c["members"] = s.member_ids;
    c["regions"] = nlohmann::json::array();
    auto add_regions = [&](const std::vector<MandatoryExtremum>& regions) {
      for (const auto& r : regions) {
        c["regions"].push_back({{"kind", detail::kind_name(r.kind)},
                                {"region_id", r.region_id},
                                {"vertex_count", r.component.size()},
                                {"interval", {r.interval_low, r.interval_high}}});
      }
    };
    add_regions(s.mandatory_minima);
    add_regions(s.mandatory_maxima);
    summary["clusters"].push_back(std::move(c));
  }
  detail::write_file(dir / "summary.json", summary.dump(2) + "\n");

  nlohmann::json index;
  index["format"] = "patlas-atlas";
  index["byte_order"] = "little-endian";
  std::vector<std::int64_t> dims(atlas.topology.dims.begin(),
                                 atlas.topology.dims.begin() + atlas.topology.dim);
  index["dims"] = dims;
  index["spacing"] = std::vector<double>(atlas.topology.spacing.begin(),
                                         atlas.topology.spacing.begin() + atlas.topology.dim);
  index["origin"] = std::vector<double>(atlas.topology.origin.begin(),
                                        atlas.topology.origin.begin() + atlas.topology.dim);
  index["n_members"] = atlas.n;
  index["k"] = atlas.clustering.k;
  index["suggested_k"] = atlas.suggested_k;
  index["gamma"] = atlas.config.gamma;
  index["cull"] = atlas.config.cull;
  index["knn"] = atlas.config.knn;
  std::string kinds = atlas.config.kinds.minima && atlas.config.kinds.maxima ? "both"
                      : atlas.config.kinds.minima                            ? "minima"
                                                                             : "maxima";
  index["kinds"] = kinds;
  index["seed"] = atlas.config.seed;
  index["artifacts"] = nlohmann::json::array();
  auto artifact = [&](const std::string& path, const std::string& dtype, bool gridded) {
    nlohmann::json a{{"path", path}, {"dtype", dtype}};
    if (gridded) a["dims"] = dims;
    index["artifacts"].push_back(std::move(a));
  };
  artifact("labels_min.raw", "i32", true);
  artifact("labels_max.raw", "i32", true);
  artifact("likelihood_min.raw", "f32", true);
  artifact("likelihood_max.raw", "f32", true);
  artifact("distances.csv", "csv", false);
  artifact("eigenvalues.csv", "csv", false);
  artifact("eigengaps.csv", "csv", false);
  artifact("embedding.csv", "csv", false);
  artifact("clusters.csv", "csv", false);
  artifact("summary.json", "json", false);
  detail::write_file(dir / "atlas.json", index.dump(2) + "\n");
}

}  // namespace patlas
