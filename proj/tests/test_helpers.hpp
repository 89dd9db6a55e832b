#pragma once

#include "geoqc/rng.hpp"
#include "geoqc/su_algebra.hpp"

namespace geoqc::test {

// Random element of su(2^n): Gaussian coefficients over the full
// nonidentity string basis.
inline Mat random_algebra_element(const FullBasis& basis, Rng& rng,
                                  double scale = 1.0) {
  Mat out = Mat::Zero(basis.dim(), basis.dim());
  for (const auto& tau : basis.taus) out += scale * rng.normal() * tau;
  return out;
}

inline Mat random_unitary(const FullBasis& basis, Rng& rng) {
  return mat_exp(random_algebra_element(basis, rng));
}

}  // namespace geoqc::test
