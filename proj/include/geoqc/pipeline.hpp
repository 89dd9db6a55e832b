#pragma once

#include <vector>

#include "geoqc/circuit.hpp"
#include "geoqc/models.hpp"
#include "geoqc/su_algebra.hpp"

namespace geoqc {

struct CompileOptions {
  bool project_segments = true;  // polar-project predicted segments
  bool refine = false;
  int refine_max_iters = 500;
  double refine_tol = 1e-6;      // stop when ||E(c) - U||_F <= tol
  double fd_step = 1e-5;         // finite-difference step (gradient cross-check path)
  double circuit_cutoff = 1e-12;
  double input_tol = 1e-6;       // special-unitarity tolerance on U
};

struct RefineResult {
  RMat coeffs;                      // N x m
  std::vector<double> error_trace;  // best-so-far ||E(c) - U||_F per iteration
  int iterations = 0;
};

struct CompileResult {
  Mat input;
  std::vector<Mat> segments_raw;  // network output, integration order
  std::vector<Mat> segments;      // after optional polar projection
  RMat coeffs;                    // N x m, row 0 = leftmost factor of E
  Mat reconstructed;              // embed_global(coeffs)
  Circuit circuit;
  double frobenius_error = 0;     // ||reconstructed - input||_F
  double fidelity_value = 0;      // |tr(U^dag reconstructed)| / d
  std::vector<double> refine_trace;
};

// Polar factor of M: the unitary Q minimizing ||M - Q||_F.
Mat nearest_unitary(const Mat& m);

// |tr(u^dag v)| / d; 1 iff v = e^{i phi} u.
double fidelity(const Mat& u, const Mat& v);

// ||E(c) - U||_F and its analytic gradient over all N*m coordinates.
double embed_error(const RMat& c, const Mat& u, const HorizontalBasis& basis);
RMat embed_error_gradient(const RMat& c, const Mat& u, const HorizontalBasis& basis);

// Minimizes ||E(c) - U||_F^2 from c0 (L-BFGS with Armijo backtracking).
// The returned coefficients never have larger error than c0.
RefineResult refine(const Mat& u, const RMat& c0, const HorizontalBasis& basis,
                    const CompileOptions& options = {});

CompileResult compile(const Mat& u, const GlobalModel& global_model,
                      const LocalModel& local_model, const HorizontalBasis& basis,
                      const CompileOptions& options = {});

nlohmann::json compile_result_to_json(const CompileResult& r);

}  // namespace geoqc
