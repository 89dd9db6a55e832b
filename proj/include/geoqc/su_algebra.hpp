#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace geoqc {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;    // dense complex matrix, dim = 2^n
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// A word over {I, sigma_1, sigma_2, sigma_3}, one slot per qubit.
// slots[k] == 0 means identity on qubit k, slots[k] == j means sigma_j.
struct PauliString {
  std::vector<std::uint8_t> slots;

  PauliString() = default;
  explicit PauliString(std::vector<std::uint8_t> s) : slots(std::move(s)) {}
  PauliString(std::initializer_list<std::uint8_t> s) : slots(s) {}

  int n() const { return static_cast<int>(slots.size()); }
  int weight() const;
  bool is_identity() const { return weight() == 0; }
  std::string str() const;  // e.g. "XIZ" for slots (1,0,3)

  bool operator==(const PauliString&) const = default;
};

// Ordered basis of the horizontal subspace: all weight-1 and weight-2
// strings. Weight-1 first, sorted by (qubit, pauli); then weight-2 sorted
// by (first qubit, second qubit, first pauli, second pauli). The order is
// load-bearing: embed_local/embed_global multiply exponentials in it.
struct HorizontalBasis {
  int n = 0;
  std::vector<PauliString> strings;
  std::vector<Mat> paulis;  // cached Kronecker-product matrices P_a
  std::vector<Mat> taus;    // cached (i/sqrt(d)) P_a

  int m() const { return static_cast<int>(strings.size()); }
  int dim() const { return 1 << n; }
};

// Full nonidentity string basis of su(2^n), 4^n - 1 elements, used for
// costate sampling. Same caching layout as HorizontalBasis.
struct FullBasis {
  int n = 0;
  std::vector<PauliString> strings;
  std::vector<Mat> taus;

  int size() const { return static_cast<int>(strings.size()); }
  int dim() const { return 1 << n; }
};

Mat pauli_matrix(const PauliString& p);

// tau = (i / sqrt(2^n)) * pauli_matrix(p); skew-Hermitian, traceless,
// unit norm under inner(). Rejects the all-identity word.
Mat basis_element(const PauliString& p);

HorizontalBasis horizontal_basis(int n);
FullBasis full_basis(int n);

// Re tr(a^dagger b). The basis_element matrices are orthonormal under it.
double inner(const Mat& a, const Mat& b);
inline double alg_norm(const Mat& a) { return std::sqrt(inner(a, a)); }

Mat proj_horizontal(const Mat& lam, const HorizontalBasis& basis);
RVec coeffs_of(const Mat& lam, const HorizontalBasis& basis);

// exp(a) for skew-Hermitian a, via eigendecomposition of the Hermitian
// matrix i*a. Result is unitary to ~1e-14 at d = 8.
Mat mat_exp(const Mat& a);

// exp(c_1 tau_1) * ... * exp(c_m tau_m), factors in canonical basis order
// (first basis element leftmost).
Mat embed_local(const RVec& c, const HorizontalBasis& basis);

// Product of embed_local over the rows of c, row 0 leftmost.
Mat embed_global(const RMat& c, const HorizontalBasis& basis);

double unitarity_defect(const Mat& m);                    // ||M^dag M - I||_F
bool is_unitary(const Mat& m, double tol = 1e-10);
bool is_special_unitary(const Mat& m, double unitary_tol = 1e-10,
                        double det_tol = 1e-8);
bool is_skew_hermitian(const Mat& m, double tol = 1e-10);

}  // namespace geoqc
