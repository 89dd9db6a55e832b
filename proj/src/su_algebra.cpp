#include "geoqc/su_algebra.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "geoqc/errors.hpp"

namespace geoqc {

namespace {

Eigen::Matrix2cd single_pauli(int k) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd p;
  switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -i, i, 0; break;
    case 3: p << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli index out of range");
  }
  return p;
}

}  // namespace

int PauliString::weight() const {
  int w = 0;
  for (auto s : slots) w += (s != 0);
  return w;
}

std::string PauliString::str() const {
  static const char* names = "IXYZ";
  std::string out;
  for (auto s : slots) out += names[s];
  return out;
}

Mat pauli_matrix(const PauliString& p) {
  if (p.slots.empty()) throw std::invalid_argument("pauli_matrix: empty word");
  Mat out = single_pauli(p.slots[0]);
  for (int k = 1; k < p.n(); ++k) {
    out = Eigen::kroneckerProduct(out, single_pauli(p.slots[k])).eval();
  }
  return out;
}

Mat basis_element(const PauliString& p) {
  if (p.is_identity()) {
    throw std::invalid_argument("basis_element: identity word is not in the algebra basis");
  }
  const double d = static_cast<double>(1 << p.n());
  return Complex(0.0, 1.0 / std::sqrt(d)) * pauli_matrix(p);
}

HorizontalBasis horizontal_basis(int n) {
  if (n < 2) throw std::invalid_argument("horizontal_basis: need n >= 2");
  HorizontalBasis basis;
  basis.n = n;
  for (int q = 0; q < n; ++q) {
    for (std::uint8_t k = 1; k <= 3; ++k) {
      PauliString p(std::vector<std::uint8_t>(n, 0));
      p.slots[q] = k;
      basis.strings.push_back(std::move(p));
    }
  }
  for (int q1 = 0; q1 < n; ++q1) {
    for (int q2 = q1 + 1; q2 < n; ++q2) {
      for (std::uint8_t k1 = 1; k1 <= 3; ++k1) {
        for (std::uint8_t k2 = 1; k2 <= 3; ++k2) {
          PauliString p(std::vector<std::uint8_t>(n, 0));
          p.slots[q1] = k1;
          p.slots[q2] = k2;
          basis.strings.push_back(std::move(p));
        }
      }
    }
  }
  basis.paulis.reserve(basis.strings.size());
  basis.taus.reserve(basis.strings.size());
  const double d = static_cast<double>(1 << n);
  for (const auto& p : basis.strings) {
    basis.paulis.push_back(pauli_matrix(p));
    basis.taus.push_back(Complex(0.0, 1.0 / std::sqrt(d)) * basis.paulis.back());
  }
  return basis;
}

FullBasis full_basis(int n) {
  if (n < 1) throw std::invalid_argument("full_basis: need n >= 1");
  FullBasis basis;
  basis.n = n;
  const int total = 1;
  (void)total;
  std::vector<std::uint8_t> word(n, 0);
  const long count = 1L << (2 * n);  // 4^n words
  for (long idx = 1; idx < count; ++idx) {
    long v = idx;
    for (int k = n - 1; k >= 0; --k) {
      word[k] = static_cast<std::uint8_t>(v & 3);
      v >>= 2;
    }
    basis.strings.emplace_back(word);
  }
  const double d = static_cast<double>(1 << n);
  basis.taus.reserve(basis.strings.size());
  for (const auto& p : basis.strings) {
    basis.taus.push_back(Complex(0.0, 1.0 / std::sqrt(d)) * pauli_matrix(p));
  }
  return basis;
}

double inner(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("inner: dimension mismatch");
  }
  return (a.adjoint() * b).trace().real();
}

Mat proj_horizontal(const Mat& lam, const HorizontalBasis& basis) {
  if (lam.rows() != basis.dim() || lam.cols() != basis.dim()) {
    throw std::invalid_argument("proj_horizontal: dimension mismatch");
  }
  Mat out = Mat::Zero(lam.rows(), lam.cols());
  for (const auto& tau : basis.taus) out += inner(tau, lam) * tau;
  return out;
}

RVec coeffs_of(const Mat& lam, const HorizontalBasis& basis) {
  if (lam.rows() != basis.dim() || lam.cols() != basis.dim()) {
    throw std::invalid_argument("coeffs_of: dimension mismatch");
  }
  RVec c(basis.m());
  for (int a = 0; a < basis.m(); ++a) c[a] = inner(basis.taus[a], lam);
  return c;
}

Mat mat_exp(const Mat& a) {
  if (!a.allFinite()) throw NumericError("mat_exp: non-finite entries");
  // i*a is Hermitian; exp(a) = V exp(-i lambda) V^dag.
  Eigen::SelfAdjointEigenSolver<Mat> es(Complex(0, 1) * a);
  if (es.info() != Eigen::Success) throw NumericError("mat_exp: eigensolver failed");
  const auto& lambda = es.eigenvalues();
  Mat phases = Mat::Zero(a.rows(), a.cols());
  for (int k = 0; k < a.rows(); ++k) {
    phases(k, k) = std::exp(Complex(0, -lambda[k]));
  }
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

Mat embed_local(const RVec& c, const HorizontalBasis& basis) {
  if (c.size() != basis.m()) throw std::invalid_argument("embed_local: length mismatch");
  const int d = basis.dim();
  Mat out = Mat::Identity(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int a = 0; a < basis.m(); ++a) {
    if (c[a] == 0.0) continue;
    // exp(c tau) = cos(theta) I + i sin(theta) P with theta = c / sqrt(d)
    const double theta = c[a] * scale;
    Mat factor = std::cos(theta) * Mat::Identity(d, d) +
                 Complex(0, std::sin(theta)) * basis.paulis[a];
    out = (out * factor).eval();
  }
  return out;
}

Mat embed_global(const RMat& c, const HorizontalBasis& basis) {
  if (c.rows() < 1 || c.cols() != basis.m()) {
    throw std::invalid_argument("embed_global: shape mismatch");
  }
  const int d = basis.dim();
  Mat out = Mat::Identity(d, d);
  for (int j = 0; j < c.rows(); ++j) {
    out = (out * embed_local(c.row(j).transpose(), basis)).eval();
  }
  return out;
}

double unitarity_defect(const Mat& m) {
  return (m.adjoint() * m - Mat::Identity(m.rows(), m.cols())).norm();
}

bool is_unitary(const Mat& m, double tol) {
  return m.rows() == m.cols() && unitarity_defect(m) <= tol;
}

bool is_special_unitary(const Mat& m, double unitary_tol, double det_tol) {
  if (!is_unitary(m, unitary_tol)) return false;
  return std::abs(m.determinant() - Complex(1, 0)) <= det_tol;
}

bool is_skew_hermitian(const Mat& m, double tol) {
  return m.rows() == m.cols() && (m + m.adjoint()).norm() <= tol;
}

}  // namespace geoqc
