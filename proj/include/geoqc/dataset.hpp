#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoqc/geodesic.hpp"
#include "geoqc/su_algebra.hpp"

namespace geoqc {

// Row encoding shared by both networks: matrix row k becomes the real
// vector [Re(row k) || Im(row k)] of length 2d, one row per timestep.
struct EncodedSequence {
  std::vector<RVec> timesteps;
};

EncodedSequence encode_matrix_rows(const Mat& m);
Mat decode_matrix_rows(const std::vector<RVec>& timesteps);

struct GlobalSample {
  Mat input;                       // geodesic endpoint U
  std::vector<Mat> target_segments;  // U_0 ... U_{N-1}, integration order
  std::uint64_t seed = 0;
  double lambda_norm = 0;
  double u0_norm = 0;
};

struct LocalSample {
  Mat input;          // one U_j
  RVec target_coeffs; // length m
};

struct GlobalDataset {
  int n = 3;
  int segments = 10;
  int m = 36;
  std::uint64_t seed = 0;
  std::vector<GlobalSample> samples;
};

struct LocalDataset {
  int n = 3;
  int segments = 10;
  int m = 36;
  std::uint64_t seed = 0;
  std::vector<LocalSample> samples;
};

GlobalDataset gen_global_dataset(int count, const GeodesicConfig& cfg,
                                 std::uint64_t seed);

// Coefficients i.i.d. uniform on [-1/N, 1/N]; inputs built with embed_local.
LocalDataset gen_local_dataset(int count, int segments, std::uint64_t seed,
                               const HorizontalBasis& basis);

// Deterministic tail split: last validation_count samples are held out.
template <typename Dataset>
std::pair<Dataset, Dataset> split(const Dataset& ds, int validation_count) {
  const int total = static_cast<int>(ds.samples.size());
  if (validation_count < 0 || validation_count >= total) {
    throw std::invalid_argument("split: validation_count must be in [0, size)");
  }
  Dataset train = ds, val = ds;
  train.samples.assign(ds.samples.begin(), ds.samples.end() - validation_count);
  val.samples.assign(ds.samples.end() - validation_count, ds.samples.end());
  return {std::move(train), std::move(val)};
}

// JSON-lines files; line 1 is the header
// {"format_version":1,"kind":"global"|"local","n":..,"N":..,"m":..,"seed":..}.
void save_dataset(const GlobalDataset& ds, const std::string& path);
void save_dataset(const LocalDataset& ds, const std::string& path);
GlobalDataset load_global_dataset(const std::string& path);
LocalDataset load_local_dataset(const std::string& path);

}  // namespace geoqc
