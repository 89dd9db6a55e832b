#include "geoqc/pipeline.hpp"

#include <cmath>
#include <deque>

#include "geoqc/errors.hpp"
#include "geoqc/matrix_json.hpp"

namespace geoqc {

Mat nearest_unitary(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-12) throw NumericError("nearest_unitary: matrix is singular");
  return svd.matrixU() * svd.matrixV().adjoint();
}

double fidelity(const Mat& u, const Mat& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

namespace {

// All N*m factors F_k = cos(theta_k) I + i sin(theta_k) P_{a(k)} in product
// order (row-major over the coefficient matrix, row 0 leftmost).
std::vector<Mat> factors_of(const RMat& c, const HorizontalBasis& basis) {
  const int d = basis.dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Mat> fs;
  fs.reserve(static_cast<std::size_t>(c.rows()) * c.cols());
  for (int j = 0; j < c.rows(); ++j) {
    for (int a = 0; a < c.cols(); ++a) {
      const double theta = c(j, a) * scale;
      fs.push_back(std::cos(theta) * Mat::Identity(d, d) +
                   Complex(0, std::sin(theta)) * basis.paulis[a]);
    }
  }
  return fs;
}

Mat product_of(const std::vector<Mat>& fs, int d) {
  Mat e = Mat::Identity(d, d);
  for (const auto& f : fs) e = (e * f).eval();
  return e;
}

}  // namespace

double embed_error(const RMat& c, const Mat& u, const HorizontalBasis& basis) {
  return (embed_global(c, basis) - u).norm();
}

RMat embed_error_gradient(const RMat& c, const Mat& u, const HorizontalBasis& basis) {
  const int d = basis.dim();
  const auto fs = factors_of(c, basis);
  const int total = static_cast<int>(fs.size());

  // prefix[k] = F_0 ... F_{k-1}; suffix[k] = F_k ... F_{K-1}
  std::vector<Mat> prefix(total + 1), suffix(total + 1);
  prefix[0] = Mat::Identity(d, d);
  for (int k = 0; k < total; ++k) prefix[k + 1] = prefix[k] * fs[k];
  suffix[total] = Mat::Identity(d, d);
  for (int k = total; k-- > 0;) suffix[k] = fs[k] * suffix[k + 1];

  const Mat diff = prefix[total] - u;  // E(c) - U
  RMat grad(c.rows(), c.cols());
  for (int k = 0; k < total; ++k) {
    const int a = k % basis.m();
    // dE/dc_k = prefix[k] * tau_a * F_k * suffix[k+1]
    const Mat middle = basis.taus[a] * fs[k];
    const Mat dE = prefix[k] * middle * suffix[k + 1];
    // d/dc_k ||E - U||_F^2 = 2 Re tr(diff^dag dE)
    grad(k / basis.m(), a) = 2.0 * (diff.conjugate().cwiseProduct(dE)).sum().real();
  }
  return grad;
}

RefineResult refine(const Mat& u, const RMat& c0, const HorizontalBasis& basis,
                    const CompileOptions& options) {
  if (!c0.allFinite()) throw std::invalid_argument("refine: non-finite start point");
  const auto eval_f = [&](const RMat& c) {
    const double e = embed_error(c, u, basis);
    return e * e;
  };

  RefineResult out;
  RMat c = c0;
  double f = eval_f(c);
  out.coeffs = c;
  out.error_trace.push_back(std::sqrt(f));
  if (std::sqrt(f) <= options.refine_tol) return out;

  // L-BFGS two-loop recursion over the flattened coordinates.
  const auto to_vec = [](const RMat& m) {
    return Eigen::Map<const RVec>(m.data(), m.size()).eval();
  };
  const auto to_mat = [&](const RVec& v) {
    return Eigen::Map<const RMat>(v.data(), c0.rows(), c0.cols()).eval();
  };

  RVec x = to_vec(c);
  RVec g = to_vec(embed_error_gradient(c, u, basis));
  std::deque<RVec> s_hist, y_hist;
  const int memory = 10;

  for (int iter = 0; iter < options.refine_max_iters; ++iter) {
    RVec q = g;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      alpha[k] = rho * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      const double beta = rho * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    RVec dir = -q;
    if (dir.dot(g) >= 0) dir = -g;  // fall back to steepest descent

    // Armijo backtracking
    double step = 1.0;
    const double slope = dir.dot(g);
    double f_new = f;
    RVec x_new = x;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      x_new = x + step * dir;
      f_new = eval_f(to_mat(x_new));
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) break;  // stalled

    RVec g_new = to_vec(embed_error_gradient(to_mat(x_new), u, basis));
    RVec s = x_new - x;
    RVec y = g_new - g;
    if (y.dot(s) > 1e-14) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    x = std::move(x_new);
    g = std::move(g_new);
    const bool improved = f_new < f;
    f = f_new;
    if (improved) out.coeffs = to_mat(x);
    out.error_trace.push_back(std::min(out.error_trace.back(), std::sqrt(f)));
    if (std::sqrt(f) <= options.refine_tol) break;
    if (g.norm() < 1e-14) break;
  }
  return out;
}

CompileResult compile(const Mat& u, const GlobalModel& global_model,
                      const LocalModel& local_model, const HorizontalBasis& basis,
                      const CompileOptions& options) {
  const double defect = unitarity_defect(u);
  if (!is_special_unitary(u, options.input_tol, options.input_tol)) {
    throw std::invalid_argument("compile: input is not special-unitary, ||U^dag U - I||_F = " +
                                std::to_string(defect));
  }
  CompileResult result;
  result.input = u;
  result.segments_raw = global_model.forward(u);
  result.segments = result.segments_raw;
  if (options.project_segments) {
    for (auto& s : result.segments) s = nearest_unitary(s);
  }

  // Segment-order convention, fixed here once: the integrator composes on
  // the left (x_{j+1} = U_j x_j), so the endpoint is U_{N-1}...U_0 as a
  // matrix product. embed_global multiplies row 0 leftmost, so row k holds
  // the coefficients of segment N-1-k.
  const int n_seg = static_cast<int>(result.segments.size());
  result.coeffs = RMat(n_seg, basis.m());
  for (int k = 0; k < n_seg; ++k) {
    result.coeffs.row(k) = local_model.forward(result.segments[n_seg - 1 - k]).transpose();
  }

  if (options.refine) {
    auto rr = refine(u, result.coeffs, basis, options);
    result.coeffs = rr.coeffs;
    result.refine_trace = rr.error_trace;
  }

  result.reconstructed = embed_global(result.coeffs, basis);
  result.frobenius_error = (result.reconstructed - u).norm();
  result.fidelity_value = fidelity(u, result.reconstructed);

  result.circuit.n_qubits = basis.n;
  for (int k = 0; k < n_seg; ++k) {
    Circuit row = synthesize_coefficients(result.coeffs.row(k).transpose(), basis,
                                          options.circuit_cutoff);
    result.circuit.gates.insert(result.circuit.gates.end(), row.gates.begin(),
                                row.gates.end());
  }
  return result;
}

nlohmann::json compile_result_to_json(const CompileResult& r) {
  nlohmann::json j;
  j["input"] = matrix_to_json(r.input);
  j["reconstructed"] = matrix_to_json(r.reconstructed);
  j["segments_raw"] = nlohmann::json::array();
  for (const auto& s : r.segments_raw) j["segments_raw"].push_back(matrix_to_json(s));
  j["segments"] = nlohmann::json::array();
  for (const auto& s : r.segments) j["segments"].push_back(matrix_to_json(s));
  j["coeffs"] = nlohmann::json::array();
  for (int k = 0; k < r.coeffs.rows(); ++k) {
    j["coeffs"].push_back(std::vector<double>(r.coeffs.row(k).begin(), r.coeffs.row(k).end()));
  }
  j["circuit"] = emit_circuit_text(r.circuit);
  j["metrics"] = {{"frobenius_error", r.frobenius_error}, {"fidelity", r.fidelity_value}};
  j["refine_trace"] = r.refine_trace;
  return j;
}

}  // namespace geoqc
