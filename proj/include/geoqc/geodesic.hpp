#pragma once

#include <cstdint>
#include <vector>

#include "geoqc/su_algebra.hpp"

namespace geoqc {

struct GeodesicConfig {
  int n = 3;               // qubits
  int segments = 10;       // N
  double norm_bound = 36;  // default dim(Delta) for n = 3

  double step() const { return 1.0 / segments; }
};

// One integrated geodesic: x_0 = I, x_{j+1} = U_j x_j,
// U_j = exp(h * proj_Delta(x_j Lambda0 x_j^dag)).
struct GeodesicSample {
  Mat lambda0;
  std::vector<Mat> segments;    // U_0 ... U_{N-1}
  std::vector<Mat> trajectory;  // x_0 ... x_N
  std::vector<RVec> controls;   // coefficients of u_j over the horizontal basis
  double lambda_norm = 0;       // ||Lambda0||
  double u0_norm = 0;           // ||proj_Delta(Lambda0)||
};

// Lambda0 = sum g_a tau_a over the full nonidentity basis, g ~ N(0,1),
// rescaled so ||Lambda0|| = r with r ~ Uniform(0, norm_bound].
Mat sample_lambda0(std::uint64_t rng_seed, const FullBasis& basis_full,
                   double norm_bound);

GeodesicSample integrate_geodesic(const Mat& lambda0, const GeodesicConfig& cfg,
                                  const HorizontalBasis& basis);

// Last trajectory point x(1) = U_{N-1} ... U_0.
const Mat& endpoint(const GeodesicSample& sample);

}  // namespace geoqc
