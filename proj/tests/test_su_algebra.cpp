#include "doctest.h"

#include "geoqc/errors.hpp"
#include "geoqc/su_algebra.hpp"
#include "test_helpers.hpp"

using namespace geoqc;

TEST_SUITE_BEGIN("su_algebra");

TEST_CASE("pauli_matrix of (3,0,0) is diag(1,1,1,1,-1,-1,-1,-1)") {
  Mat m = pauli_matrix({3, 0, 0});
  REQUIRE(m.rows() == 8);
  Mat expected = Mat::Zero(8, 8);
  for (int k = 0; k < 8; ++k) expected(k, k) = (k < 4) ? 1.0 : -1.0;
  CHECK((m - expected).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("pauli_matrix of the identity word is the identity") {
  CHECK((pauli_matrix({0, 0, 0}) - Mat::Identity(8, 8)).norm() < 1e-15);
}

TEST_CASE("disjoint supports factor as a matrix product") {
  Mat lhs = pauli_matrix({1, 0, 2});
  Mat rhs = pauli_matrix({1, 0, 0}) * pauli_matrix({0, 0, 2});
  CHECK((lhs - rhs).norm() < 1e-14);
}

TEST_CASE("pauli_matrix rejects the empty word") {
  CHECK_THROWS_AS(pauli_matrix(PauliString{}), std::invalid_argument);
}

TEST_CASE("pauli closure: P^2 = I for all horizontal strings") {
  const auto basis = horizontal_basis(3);
  for (const auto& p : basis.paulis) {
    CHECK((p * p - Mat::Identity(8, 8)).norm() < 1e-12);
  }
}

TEST_CASE("basis_element is skew-Hermitian, traceless and unit norm") {
  Mat tau = basis_element({3, 0, 0});
  CHECK((tau - Complex(0, 1.0 / std::sqrt(8.0)) * pauli_matrix({3, 0, 0})).norm() < 1e-15);
  CHECK((tau + tau.adjoint()).norm() < 1e-12);
  CHECK(std::abs(tau.trace()) < 1e-12);
  CHECK(inner(tau, tau) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(basis_element(PauliString{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("horizontal basis counts and canonical order") {
  const auto b3 = horizontal_basis(3);
  CHECK(b3.m() == 36);
  CHECK(b3.strings.front() == PauliString{1, 0, 0});
  const auto b2 = horizontal_basis(2);
  CHECK(b2.m() == 15);  // 6 + 9 = dim su(4): Delta is the whole algebra
  CHECK_THROWS_AS(horizontal_basis(1), std::invalid_argument);
}

TEST_CASE("orthonormality over all 36x36 pairs") {
  const auto basis = horizontal_basis(3);
  for (int a = 0; a < basis.m(); ++a) {
    for (int b = 0; b < basis.m(); ++b) {
      const double expected = (a == b) ? 1.0 : 0.0;
      CHECK(std::abs(inner(basis.taus[a], basis.taus[b]) - expected) < 1e-12);
    }
  }
}

TEST_CASE("inner is linear and positive") {
  const auto basis = horizontal_basis(3);
  const Mat& t1 = basis.taus[0];
  const Mat& t2 = basis.taus[1];
  CHECK(inner(t1, 2.0 * t1 + 3.0 * t2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(inner(t1, t1) > 0);
  CHECK(inner(Mat::Zero(8, 8), Mat::Zero(8, 8)) == 0.0);
  CHECK_THROWS_AS(inner(t1, Mat::Identity(4, 4)), std::invalid_argument);
}

TEST_CASE("proj_horizontal fixes the subspace and kills weight-3 strings") {
  const auto basis = horizontal_basis(3);
  for (int a : {0, 7, 20, 35}) {
    CHECK((proj_horizontal(basis.taus[a], basis) - basis.taus[a]).norm() < 1e-12);
  }
  Mat w3 = basis_element({1, 2, 3});
  CHECK(proj_horizontal(w3, basis).norm() < 1e-12);
}

TEST_CASE("proj_horizontal idempotence on 50 random elements") {
  const auto basis = horizontal_basis(3);
  const auto full = full_basis(3);
  Rng rng(42);
  for (int t = 0; t < 50; ++t) {
    Mat lam = test::random_algebra_element(full, rng);
    Mat once = proj_horizontal(lam, basis);
    CHECK((proj_horizontal(once, basis) - once).norm() < 1e-12);
  }
}

TEST_CASE("proj_horizontal is self-adjoint") {
  const auto basis = horizontal_basis(3);
  const auto full = full_basis(3);
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    Mat a = test::random_algebra_element(full, rng);
    Mat b = test::random_algebra_element(full, rng);
    CHECK(std::abs(inner(proj_horizontal(a, basis), b) -
                   inner(a, proj_horizontal(b, basis))) < 1e-12);
  }
}

TEST_CASE("coeffs_of reconstructs the projection") {
  const auto basis = horizontal_basis(3);
  const auto full = full_basis(3);
  Rng rng(3);
  CHECK((coeffs_of(basis.taus[5], basis) - RVec::Unit(36, 5)).norm() < 1e-12);
  CHECK(coeffs_of(Mat::Zero(8, 8), basis).norm() == 0.0);
  for (int t = 0; t < 10; ++t) {
    Mat lam = test::random_algebra_element(full, rng);
    RVec c = coeffs_of(lam, basis);
    Mat rebuilt = Mat::Zero(8, 8);
    for (int a = 0; a < basis.m(); ++a) rebuilt += c[a] * basis.taus[a];
    CHECK((rebuilt - proj_horizontal(lam, basis)).norm() < 1e-12);
  }
}

TEST_CASE("mat_exp basics") {
  CHECK((mat_exp(Mat::Zero(8, 8)) - Mat::Identity(8, 8)).norm() < 1e-14);

  // exp(i theta P) = cos(theta) I + i sin(theta) P
  const auto basis = horizontal_basis(3);
  for (int a : {0, 11, 29}) {
    const double theta = 0.37;
    Mat expd = mat_exp(Complex(0, theta) * basis.paulis[a]);
    Mat closed = std::cos(theta) * Mat::Identity(8, 8) +
                 Complex(0, std::sin(theta)) * basis.paulis[a];
    CHECK((expd - closed).norm() < 1e-12);
  }
}

TEST_CASE("mat_exp unitarity and inverse over 100 random draws") {
  const auto full = full_basis(3);
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    Mat a = test::random_algebra_element(full, rng);
    Mat e = mat_exp(a);
    CHECK(unitarity_defect(e) < 1e-10);
    CHECK((e * mat_exp(-a) - Mat::Identity(8, 8)).norm() < 1e-10);
  }
}

TEST_CASE("mat_exp rejects non-finite input") {
  Mat bad = Mat::Zero(8, 8);
  bad(0, 1) = Complex(std::nan(""), 0);
  CHECK_THROWS_AS(mat_exp(bad), NumericError);
}

TEST_CASE("embed_local basics") {
  const auto basis = horizontal_basis(3);
  CHECK((embed_local(RVec::Zero(36), basis) - Mat::Identity(8, 8)).norm() < 1e-14);

  RVec c = RVec::Zero(36);
  c[4] = 0.8;
  CHECK((embed_local(c, basis) - mat_exp(0.8 * basis.taus[4])).norm() < 1e-12);
  CHECK_THROWS_AS(embed_local(RVec::Zero(10), basis), std::invalid_argument);
}

TEST_CASE("embed_local and embed_global are unitary") {
  const auto basis = horizontal_basis(3);
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    RVec c(36);
    for (int a = 0; a < 36; ++a) c[a] = rng.uniform(-1, 1);
    CHECK(unitarity_defect(embed_local(c, basis)) < 1e-10);
  }
  RMat cmat(10, 36);
  for (int j = 0; j < 10; ++j) {
    for (int a = 0; a < 36; ++a) cmat(j, a) = rng.uniform(-0.1, 0.1);
  }
  CHECK(unitarity_defect(embed_global(cmat, basis)) < 1e-10);
}

TEST_CASE("embed_global reduces to embed_local for one segment") {
  const auto basis = horizontal_basis(3);
  Rng rng(5);
  RVec c(36);
  for (int a = 0; a < 36; ++a) c[a] = rng.uniform(-0.5, 0.5);
  RMat row(1, 36);
  row.row(0) = c.transpose();
  CHECK((embed_global(row, basis) - embed_local(c, basis)).norm() < 1e-13);
  CHECK((embed_global(RMat::Zero(4, 36), basis) - Mat::Identity(8, 8)).norm() < 1e-13);
}

TEST_CASE("disjoint single-body segments commute into one segment") {
  const auto basis = horizontal_basis(3);
  // basis[0] acts on qubit 0, basis[5] on qubit 1: disjoint supports
  RMat two = RMat::Zero(2, 36);
  two(0, 0) = 0.4;
  two(1, 5) = -0.7;
  RVec merged = RVec::Zero(36);
  merged[0] = 0.4;
  merged[5] = -0.7;
  CHECK((embed_global(two, basis) - embed_local(merged, basis)).norm() < 1e-12);
}

TEST_SUITE_END();
