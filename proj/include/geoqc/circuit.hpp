#pragma once

#include <string>
#include <vector>

#include "geoqc/su_algebra.hpp"

namespace geoqc {

enum class GateKind { CNOT, R3, H, Hdag, Y, Ydag };

// Gate alphabet of the synthesis backend. R3(theta) = exp(i theta sigma_3)
// = diag(e^{i theta}, e^{-i theta}). Note Y here is (1/sqrt2)(I + i sigma_1)
// as used by the basis-change identity Y sigma_3 Y^dag = sigma_2; it is NOT
// the Pauli-Y gate.
struct Gate {
  GateKind kind;
  int q0 = 0;          // target for single-qubit gates, control for CNOT
  int q1 = -1;         // CNOT target
  double angle = 0.0;  // R3 only, radians

  bool operator==(const Gate&) const = default;
};

// Gates compose as written: the circuit unitary is the matrix product of
// the gate matrices in list order (gates[0] is the leftmost factor).
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  bool operator==(const Circuit&) const = default;
};

Mat gate_matrix(const Gate& g, int n);

// Circuit for exp(i theta P): basis-change layer (H on sigma_1 slots, Y on
// sigma_2 slots), CNOT ladder chaining the support qubits in ascending
// order onto the last support qubit, R3 there, mirrored ladder, dagger
// basis-change layer.
Circuit synthesize_exponential(const PauliString& p, double theta);

Mat circuit_unitary(const Circuit& c);

// theta = c / sqrt(2^n), so mat_exp(c * tau_p) equals the synthesized
// circuit for (p, theta).
double coefficient_to_angle(double c, int dim);

// Concatenation of per-term circuits in canonical basis order; terms with
// |c_a| < cutoff are dropped.
Circuit synthesize_coefficients(const RVec& c, const HorizontalBasis& basis,
                                double cutoff = 1e-12);

// One gate per line, preceded by the header "# geoqc-circuit v1 n=<n>".
std::string emit_circuit_text(const Circuit& c);
Circuit parse_circuit_text(const std::string& text);

}  // namespace geoqc
