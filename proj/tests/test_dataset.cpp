#include "doctest.h"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geoqc/dataset.hpp"
#include "geoqc/errors.hpp"
#include "test_helpers.hpp"

using namespace geoqc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/geoqc_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("encoding the identity gives unit rows") {
  auto seq = encode_matrix_rows(Mat::Identity(8, 8));
  REQUIRE(seq.timesteps.size() == 8);
  for (int k = 0; k < 8; ++k) {
    REQUIRE(seq.timesteps[k].size() == 16);
    CHECK(seq.timesteps[k][k] == 1.0);
    CHECK(seq.timesteps[k].sum() == 1.0);
    CHECK(seq.timesteps[k].tail(8).norm() == 0.0);
  }
}

TEST_CASE("encode/decode round trip is exact on random unitaries") {
  const auto full = full_basis(3);
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    Mat u = test::random_unitary(full, rng);
    Mat back = decode_matrix_rows(encode_matrix_rows(u).timesteps);
    CHECK((u - back).norm() == 0.0);  // bit-for-bit
    // unitary rows have unit Euclidean norm, preserved by the encoding
    for (const auto& v : encode_matrix_rows(u).timesteps) {
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("global dataset samples satisfy the product invariant") {
  GeodesicConfig cfg;
  auto ds = gen_global_dataset(20, cfg, 5);
  REQUIRE(ds.samples.size() == 20);
  for (const auto& s : ds.samples) {
    Mat prod = Mat::Identity(8, 8);
    for (const auto& u : s.target_segments) prod = (u * prod).eval();
    CHECK((prod - s.input).norm() < 1e-10);
    CHECK(s.lambda_norm <= 36.0 + 1e-9);
    CHECK(s.u0_norm <= s.lambda_norm + 1e-9);
  }
  CHECK_THROWS_AS(gen_global_dataset(0, cfg, 1), std::invalid_argument);
}

TEST_CASE("local dataset coefficients are bounded by 1/N") {
  const auto basis = horizontal_basis(3);
  auto ds = gen_local_dataset(50, 10, 3, basis);
  for (const auto& s : ds.samples) {
    CHECK(s.target_coeffs.cwiseAbs().maxCoeff() <= 0.1);
    CHECK((embed_local(s.target_coeffs, basis) - s.input).norm() < 1e-12);
  }
}

TEST_CASE("split is a stable disjoint tail split") {
  const auto basis = horizontal_basis(3);
  auto ds = gen_local_dataset(100, 10, 9, basis);
  auto [train, val] = split(ds, 20);
  CHECK(train.samples.size() == 80);
  CHECK(val.samples.size() == 20);
  auto [train2, val2] = split(ds, 20);
  CHECK((train.samples[0].target_coeffs - train2.samples[0].target_coeffs).norm() == 0.0);
  CHECK((val.samples[19].target_coeffs - ds.samples[99].target_coeffs).norm() == 0.0);
  CHECK((train.samples[79].target_coeffs - ds.samples[79].target_coeffs).norm() == 0.0);
  CHECK_THROWS_AS(split(ds, 100), std::invalid_argument);
}

TEST_CASE("same seed produces byte-identical dataset files") {
  GeodesicConfig cfg;
  TempFile f1("det1.jsonl"), f2("det2.jsonl");
  save_dataset(gen_global_dataset(5, cfg, 42), f1.path);
  save_dataset(gen_global_dataset(5, cfg, 42), f2.path);
  CHECK(slurp(f1.path) == slurp(f2.path));
  CHECK(slurp(f1.path).size() > 0);
}

TEST_CASE("global save/load round trip preserves samples bit-for-bit") {
  GeodesicConfig cfg;
  auto ds = gen_global_dataset(10, cfg, 8);
  TempFile f("global_rt.jsonl");
  save_dataset(ds, f.path);
  auto loaded = load_global_dataset(f.path);
  REQUIRE(loaded.samples.size() == ds.samples.size());
  CHECK(loaded.seed == ds.seed);
  for (std::size_t k = 0; k < ds.samples.size(); ++k) {
    CHECK((loaded.samples[k].input - ds.samples[k].input).norm() == 0.0);
    for (std::size_t j = 0; j < ds.samples[k].target_segments.size(); ++j) {
      CHECK((loaded.samples[k].target_segments[j] - ds.samples[k].target_segments[j]).norm() == 0.0);
    }
  }
}

TEST_CASE("local save/load round trip preserves samples bit-for-bit") {
  const auto basis = horizontal_basis(3);
  auto ds = gen_local_dataset(100, 10, 21, basis);
  TempFile f("local_rt.jsonl");
  save_dataset(ds, f.path);
  auto loaded = load_local_dataset(f.path);
  REQUIRE(loaded.samples.size() == 100);
  for (std::size_t k = 0; k < ds.samples.size(); ++k) {
    CHECK((loaded.samples[k].input - ds.samples[k].input).norm() == 0.0);
    CHECK((loaded.samples[k].target_coeffs - ds.samples[k].target_coeffs).norm() == 0.0);
  }
}

TEST_CASE("empty file loads as an empty dataset") {
  TempFile f("empty.jsonl");
  std::ofstream(f.path).close();
  CHECK(load_global_dataset(f.path).samples.empty());
  CHECK(load_local_dataset(f.path).samples.empty());
}

TEST_CASE("truncated line errors name the line") {
  const auto basis = horizontal_basis(3);
  auto ds = gen_local_dataset(3, 10, 4, basis);
  TempFile f("trunc.jsonl");
  save_dataset(ds, f.path);
  std::string contents = slurp(f.path);
  contents.resize(contents.size() - 40);  // cut into the last sample line
  std::ofstream(f.path) << contents;
  try {
    load_local_dataset(f.path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("kind and version mismatches are explicit errors") {
  const auto basis = horizontal_basis(3);
  TempFile f("kind.jsonl");
  save_dataset(gen_local_dataset(2, 10, 4, basis), f.path);
  CHECK_THROWS_AS(load_global_dataset(f.path), ParseError);

  TempFile v("ver.jsonl");
  std::ofstream(v.path) << R"({"format_version":2,"kind":"local","n":3,"N":10,"m":36,"seed":0})" << "\n";
  CHECK_THROWS_AS(load_local_dataset(v.path), ParseError);

  CHECK_THROWS_AS(load_local_dataset("/nonexistent/geoqc.jsonl"), std::runtime_error);
}

TEST_CASE("generation rate stays above 50 geodesic samples per second") {
  GeodesicConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  auto ds = gen_global_dataset(100, cfg, 77);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(ds.samples.size() == 100);
  CHECK(100.0 / secs > 50.0);
}

TEST_SUITE_END();
