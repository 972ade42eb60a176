#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "patlas/io.hpp"

using namespace patlas;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = fs::temp_directory_path() / ("patlas_io_" + tag + "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Ensemble small_ensemble(int n = 2) {
  auto g = build_grid({3, 3}, {0.5, 0.5}, {1.0, 2.0});
  std::vector<ScalarFieldGrid> members;
  for (int m = 0; m < n; ++m) members.push_back(test_helpers::random_field(g, 11 + m, m, -3.0, 9.0));
  return make_ensemble(members);
}

}  // namespace

TEST_CASE("ensemble raw round trip is bit exact for f64") {
  auto dir = fresh_dir("roundtrip");
  auto e = small_ensemble();
  auto manifest = write_ensemble(e, dir, RawDtype::f64);
  auto back = read_ensemble(manifest);
  REQUIRE(back.n() == 2);
  CHECK(back.topology.same_as(e.topology));
  for (int m = 0; m < 2; ++m) CHECK(back.members[m].values == e.members[m].values);
}

TEST_CASE("f32 blobs are widened to doubles") {
  auto dir = fresh_dir("f32");
  auto e = small_ensemble();
  auto manifest = write_ensemble(e, dir, RawDtype::f32);
  auto back = read_ensemble(manifest);
  for (int m = 0; m < 2; ++m)
    for (std::size_t v = 0; v < e.members[m].values.size(); ++v)
      CHECK(back.members[m].values[v] == static_cast<double>(static_cast<float>(e.members[m].values[v])));
}

TEST_CASE("short blob reports a size mismatch naming the member") {
  auto dir = fresh_dir("short");
  auto manifest = write_ensemble(small_ensemble(), dir, RawDtype::f64);
  fs::resize_file(dir / "member_001.raw", fs::file_size(dir / "member_001.raw") - 1);
  try {
    read_ensemble(manifest);
    FAIL("expected an error");
  } catch (const error& e) {
    CHECK(e.code() == "SIZE_MISMATCH");
    CHECK(std::string(e.what()).find("member 1") != std::string::npos);
  }
}

TEST_CASE("missing blob reports the member") {
  auto dir = fresh_dir("missing");
  auto manifest = write_ensemble(small_ensemble(), dir, RawDtype::f64);
  fs::remove(dir / "member_000.raw");
  try {
    read_ensemble(manifest);
    FAIL("expected an error");
  } catch (const error& e) {
    CHECK(e.code() == "MISSING_FILE");
    CHECK(e.kind() == error_kind::io);
    CHECK(std::string(e.what()).find("member 0") != std::string::npos);
  }
}

TEST_CASE("bad dtype and non-contiguous ids are rejected") {
  auto dir = fresh_dir("manifest");
  auto e = small_ensemble();
  write_ensemble(e, dir, RawDtype::f64);

  std::ifstream in(dir / "manifest.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  {
    std::string bad = text;
    bad.replace(bad.find("f64"), 3, "u16");
    std::ofstream out(dir / "bad_dtype.json");
    out << bad;
    out.close();
    try {
      read_ensemble(dir / "bad_dtype.json");
      FAIL("expected an error");
    } catch (const error& err) {
      CHECK(err.code() == "BAD_DTYPE");
    }
  }
  {
    std::string bad = text;
    bad.replace(bad.find("\"id\": 1"), 7, "\"id\": 3");
    std::ofstream out(dir / "bad_ids.json");
    out << bad;
    out.close();
    try {
      read_ensemble(dir / "bad_ids.json");
      FAIL("expected an error");
    } catch (const error& err) {
      CHECK(err.code() == "NONCONTIGUOUS_IDS");
    }
  }
  CHECK_THROWS_AS(read_ensemble(dir / "nonexistent.json"), error);
}

TEST_CASE("csv matrices have one line per row and re-parse exactly") {
  auto dir = fresh_dir("csv");
  std::vector<double> entries{0.0, 1.0 / 3.0, 0.7071067811865476, 1.0 / 3.0, 0.0,
                              2.5e-17,        0.7071067811865476, 2.5e-17,  0.0};
  write_csv_matrix(entries, 3, dir / "m.csv");

  std::ifstream in(dir / "m.csv", std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("\r\n") != std::string::npos);

  auto rows = read_csv_matrix(dir / "m.csv");
  REQUIRE(rows.size() == 3);
  for (int x = 0; x < 3; ++x) {
    REQUIRE(rows[x].size() == 3);
    for (int y = 0; y < 3; ++y) CHECK(rows[x][y] == entries[3 * x + y]);
  }
}

TEST_CASE("pgm export maps the range linearly with ties to even") {
  auto g = build_grid({3, 2}, {1.0, 1.0}, {0.0, 0.0});
  auto f = make_field(g, {0.0, 1.0, 2.0, 0.0, 2.0, 2.0}, 0);
  auto dir = fresh_dir("pgm");
  write_pgm(f, dir / "f.pgm");

  auto bytes = detail::read_file(dir / "f.pgm");
  std::string header(bytes.begin(), bytes.begin() + 11);
  CHECK(header == "P5\n3 2\n6553");
  std::size_t offset = std::string("P5\n3 2\n65535\n").size();
  auto pixel = [&](int i) {
    return static_cast<int>(bytes[offset + 2 * i]) * 256 + static_cast<int>(bytes[offset + 2 * i + 1]);
  };
  CHECK(pixel(0) == 0);
  CHECK(pixel(1) == 32768);  // 32767.5 rounds to even
  CHECK(pixel(2) == 65535);

  auto constant = make_field(g, std::vector<double>(6, 4.0), 0);
  write_pgm(constant, dir / "c.pgm");
  auto cbytes = detail::read_file(dir / "c.pgm");
  for (std::size_t i = offset; i < cbytes.size(); ++i) CHECK(cbytes[i] == 0);

  auto g3 = build_grid({2, 2, 2}, {1, 1, 1}, {0, 0, 0});
  CHECK_THROWS_AS(write_pgm(make_field(g3, std::vector<double>(8, 0.0), 0), dir / "x.pgm"), error);
}

TEST_CASE("17 significant digits round-trip doubles exactly") {
  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.next() % 20) - 10.0);
    double back = std::strtod(detail::fmt_g17(x).c_str(), nullptr);
    CHECK(back == x);
  }
}
