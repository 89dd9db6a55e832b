#include "doctest.h"

#include "geoqc/circuit.hpp"
#include "geoqc/errors.hpp"
#include "geoqc/rng.hpp"
#include "geoqc/su_algebra.hpp"

using namespace geoqc;

namespace {

Mat closed_form(const PauliString& p, double theta) {
  const int d = 1 << p.n();
  return std::cos(theta) * Mat::Identity(d, d) +
         Complex(0, std::sin(theta)) * pauli_matrix(p);
}

}  // namespace

TEST_SUITE_BEGIN("circuit");

TEST_CASE("basis-change identities of the gate alphabet") {
  Mat y = gate_matrix({GateKind::Y, 0}, 1);
  Mat ydag = gate_matrix({GateKind::Ydag, 0}, 1);
  Mat h = gate_matrix({GateKind::H, 0}, 1);
  Mat s1 = pauli_matrix({1});
  Mat s2 = pauli_matrix({2});
  Mat s3 = pauli_matrix({3});
  CHECK((y * s3 * ydag - s2).norm() < 1e-12);
  CHECK((h * s3 * h.adjoint() - s1).norm() < 1e-12);
  CHECK((gate_matrix({GateKind::R3, 0, -1, 0.0}, 1) - Mat::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("gate_matrix rejects bad indices") {
  CHECK_THROWS_AS(gate_matrix({GateKind::H, 3}, 3), std::invalid_argument);
  CHECK_THROWS_AS(gate_matrix({GateKind::CNOT, 0, 0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(gate_matrix({GateKind::CNOT, 0, 5}, 3), std::invalid_argument);
}

TEST_CASE("worked example: sigma3 x I x sigma3") {
  Circuit c = synthesize_exponential({3, 0, 3}, 0.55);
  REQUIRE(c.gates.size() == 3);
  CHECK(c.gates[0] == Gate{GateKind::CNOT, 0, 2});
  CHECK(c.gates[1] == Gate{GateKind::R3, 2, -1, 0.55});
  CHECK(c.gates[2] == Gate{GateKind::CNOT, 0, 2});
  CHECK((circuit_unitary(c) - closed_form({3, 0, 3}, 0.55)).norm() < 1e-10);
}

TEST_CASE("worked example: sigma1 x I x sigma2") {
  Circuit c = synthesize_exponential({1, 0, 2}, 0.3);
  REQUIRE(c.gates.size() == 7);
  CHECK(c.gates[0] == Gate{GateKind::H, 0});
  CHECK(c.gates[1] == Gate{GateKind::Y, 2});
  CHECK(c.gates[2] == Gate{GateKind::CNOT, 0, 2});
  CHECK(c.gates[3] == Gate{GateKind::R3, 2, -1, 0.3});
  CHECK(c.gates[4] == Gate{GateKind::CNOT, 0, 2});
  CHECK(c.gates[5] == Gate{GateKind::Hdag, 0});
  CHECK(c.gates[6] == Gate{GateKind::Ydag, 2});
  CHECK((circuit_unitary(c) - closed_form({1, 0, 2}, 0.3)).norm() < 1e-10);
}

TEST_CASE("weight-1 string needs no ladder") {
  Circuit c = synthesize_exponential({0, 3, 0}, 1.1);
  REQUIRE(c.gates.size() == 1);
  CHECK(c.gates[0] == Gate{GateKind::R3, 1, -1, 1.1});
  CHECK_THROWS_AS(synthesize_exponential(PauliString{0, 0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("circuit_unitary basics") {
  CHECK((circuit_unitary({3, {}}) - Mat::Identity(8, 8)).norm() < 1e-15);
  Circuit twice{3, {{GateKind::CNOT, 0, 1}, {GateKind::CNOT, 0, 1}}};
  CHECK((circuit_unitary(twice) - Mat::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("every horizontal string matches the closed form over sampled angles") {
  const auto basis = horizontal_basis(3);
  for (const auto& p : basis.strings) {
    for (double theta : {0.1, 0.7, 1.0}) {
      Circuit c = synthesize_exponential(p, theta);
      CHECK((circuit_unitary(c) - closed_form(p, theta)).norm() < 1e-10);
    }
  }
}

TEST_CASE("gate counts follow the ladder structure") {
  const auto basis = horizontal_basis(3);
  for (const auto& p : basis.strings) {
    Circuit c = synthesize_exponential(p, 0.2);
    int cnots = 0, r3 = 0, single = 0;
    for (const auto& g : c.gates) {
      if (g.kind == GateKind::CNOT) ++cnots;
      else if (g.kind == GateKind::R3) ++r3;
      else ++single;
    }
    int xy_slots = 0;
    for (auto s : p.slots) xy_slots += (s == 1 || s == 2);
    CHECK(cnots == 2 * (p.weight() - 1));
    CHECK(r3 == 1);
    CHECK(single == 2 * xy_slots);
  }
}

TEST_CASE("coefficient_to_angle bridges tau and circuit conventions") {
  CHECK(coefficient_to_angle(0.0, 8) == 0.0);
  CHECK(coefficient_to_angle(std::sqrt(8.0), 8) == doctest::Approx(1.0).epsilon(1e-15));

  const auto basis = horizontal_basis(3);
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const int a = static_cast<int>(rng.uniform() * basis.m());
    const double c = rng.uniform(-2, 2);
    Mat expd = mat_exp(c * basis.taus[a]);
    Circuit circ = synthesize_exponential(basis.strings[a], coefficient_to_angle(c, 8));
    CHECK((circuit_unitary(circ) - expd).norm() < 1e-10);
  }
}

TEST_CASE("synthesize_coefficients equals embed_local") {
  const auto basis = horizontal_basis(3);
  CHECK(synthesize_coefficients(RVec::Zero(36), basis).gates.empty());

  RVec single = RVec::Zero(36);
  single[9] = 0.5;
  CHECK(synthesize_coefficients(single, basis) ==
        synthesize_exponential(basis.strings[9], coefficient_to_angle(0.5, 8)));

  Rng rng(29);
  for (int t = 0; t < 50; ++t) {
    RVec c(36);
    for (int a = 0; a < 36; ++a) c[a] = rng.uniform(-0.3, 0.3);
    Circuit circ = synthesize_coefficients(c, basis);
    CHECK((circuit_unitary(circ) - embed_local(c, basis)).norm() < 1e-9);
  }
  CHECK_THROWS_AS(synthesize_coefficients(RVec::Zero(5), basis), std::invalid_argument);
}

TEST_CASE("emit/parse round trip is lossless") {
  const auto basis = horizontal_basis(3);
  Rng rng(31);
  RVec c(36);
  for (int a = 0; a < 36; ++a) c[a] = rng.uniform(-0.3, 0.3);
  Circuit circ = synthesize_coefficients(c, basis);
  CHECK(parse_circuit_text(emit_circuit_text(circ)) == circ);

  Circuit empty{3, {}};
  CHECK(emit_circuit_text(empty) == "# geoqc-circuit v1 n=3\n");
  CHECK(parse_circuit_text(emit_circuit_text(empty)) == empty);
}

TEST_CASE("ZIZ exponential emits exactly three gate lines") {
  Circuit c = synthesize_exponential({3, 0, 3}, 0.25);
  const std::string text = emit_circuit_text(c);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 gates
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_circuit_text("# geoqc-circuit v1 n=3\nBOGUS q0\n"), ParseError);
  CHECK_THROWS_AS(parse_circuit_text("CNOT q0 q1\n"), ParseError);  // missing header
}

TEST_SUITE_END();
