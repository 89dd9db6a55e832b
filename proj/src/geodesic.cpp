#include "geoqc/geodesic.hpp"

#include <stdexcept>
#include <string>

#include "geoqc/errors.hpp"
#include "geoqc/rng.hpp"

namespace geoqc {

Mat sample_lambda0(std::uint64_t rng_seed, const FullBasis& basis_full,
                   double norm_bound) {
  if (norm_bound <= 0) throw std::invalid_argument("sample_lambda0: norm_bound must be positive");
  Rng rng(rng_seed);
  const int d = basis_full.dim();
  Mat lam = Mat::Zero(d, d);
  double norm_sq = 0;
  for (const auto& tau : basis_full.taus) {
    const double g = rng.normal();
    lam += g * tau;
    norm_sq += g * g;  // taus are orthonormal
  }
  double r = 0.0;
  while (r == 0.0) r = rng.uniform() * norm_bound;  // uniform on (0, bound]
  return (r / std::sqrt(norm_sq)) * lam;
}

GeodesicSample integrate_geodesic(const Mat& lambda0, const GeodesicConfig& cfg,
                                  const HorizontalBasis& basis) {
  if (!is_skew_hermitian(lambda0, 1e-9)) {
    throw std::invalid_argument("integrate_geodesic: lambda0 is not skew-Hermitian");
  }
  if (cfg.segments < 1) throw std::invalid_argument("integrate_geodesic: need N >= 1");
  const int d = basis.dim();
  const double h = cfg.step();

  GeodesicSample out;
  out.lambda0 = lambda0;
  out.lambda_norm = alg_norm(lambda0);
  out.u0_norm = alg_norm(proj_horizontal(lambda0, basis));
  out.trajectory.push_back(Mat::Identity(d, d));

  for (int j = 0; j < cfg.segments; ++j) {
    const Mat& x = out.trajectory.back();
    const Mat conj = x * lambda0 * x.adjoint();
    RVec c = coeffs_of(conj, basis);
    Mat u = Mat::Zero(d, d);
    for (int a = 0; a < basis.m(); ++a) u += c[a] * basis.taus[a];
    Mat step_u = mat_exp(h * u);
    if (!step_u.allFinite()) {
      throw NumericError("integrate_geodesic: non-finite segment at step " + std::to_string(j));
    }
    out.controls.push_back(std::move(c));
    out.trajectory.push_back(step_u * x);
    out.segments.push_back(std::move(step_u));
  }
  return out;
}

const Mat& endpoint(const GeodesicSample& sample) {
  return sample.trajectory.back();
}

}  // namespace geoqc
