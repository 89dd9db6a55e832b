#include "geoqc/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "geoqc/errors.hpp"

namespace geoqc {

namespace {

Eigen::Matrix2cd gate_2x2(GateKind kind, double angle) {
  const Complex i(0, 1);
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd g;
  switch (kind) {
    case GateKind::H:
    case GateKind::Hdag:  // H is Hermitian
      g << s, s, s, -s;
      break;
    case GateKind::Y:
      g << s, i * s, i * s, s;
      break;
    case GateKind::Ydag:
      g << s, -i * s, -i * s, s;
      break;
    case GateKind::R3:
      g << std::exp(i * angle), 0, 0, std::exp(-i * angle);
      break;
    default:
      throw std::invalid_argument("gate_2x2: not a single-qubit gate");
  }
  return g;
}

Mat embed_single(const Eigen::Matrix2cd& g, int q, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    const Mat factor = (k == q) ? Mat(g) : Mat(Mat::Identity(2, 2));
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::CNOT: return "CNOT";
    case GateKind::R3: return "R3";
    case GateKind::H: return "H";
    case GateKind::Hdag: return "HDAG";
    case GateKind::Y: return "Y";
    case GateKind::Ydag: return "YDAG";
  }
  return "?";
}

}  // namespace

Mat gate_matrix(const Gate& g, int n) {
  if (g.q0 < 0 || g.q0 >= n) throw std::invalid_argument("gate_matrix: qubit index out of range");
  if (g.kind == GateKind::CNOT) {
    if (g.q1 < 0 || g.q1 >= n) throw std::invalid_argument("gate_matrix: target out of range");
    if (g.q1 == g.q0) throw std::invalid_argument("gate_matrix: control equals target");
    const int d = 1 << n;
    Mat out = Mat::Zero(d, d);
    const int cbit = n - 1 - g.q0;  // qubit 0 is the most significant bit
    const int tbit = n - 1 - g.q1;
    for (int b = 0; b < d; ++b) {
      const int flipped = ((b >> cbit) & 1) ? (b ^ (1 << tbit)) : b;
      out(flipped, b) = 1;
    }
    return out;
  }
  return embed_single(gate_2x2(g.kind, g.angle), g.q0, n);
}

Circuit synthesize_exponential(const PauliString& p, double theta) {
  if (p.is_identity()) throw std::invalid_argument("synthesize_exponential: identity string");
  Circuit c;
  c.n_qubits = p.n();

  std::vector<int> support;
  for (int q = 0; q < p.n(); ++q) {
    if (p.slots[q] != 0) support.push_back(q);
  }
  for (int q : support) {
    if (p.slots[q] == 1) c.gates.push_back({GateKind::H, q});
    if (p.slots[q] == 2) c.gates.push_back({GateKind::Y, q});
  }
  const int last = support.back();
  for (std::size_t k = 0; k + 1 < support.size(); ++k) {
    c.gates.push_back({GateKind::CNOT, support[k], support[k + 1]});
  }
  c.gates.push_back({GateKind::R3, last, -1, theta});
  for (std::size_t k = support.size() - 1; k >= 1; --k) {
    c.gates.push_back({GateKind::CNOT, support[k - 1], support[k]});
  }
  for (int q : support) {
    if (p.slots[q] == 1) c.gates.push_back({GateKind::Hdag, q});
    if (p.slots[q] == 2) c.gates.push_back({GateKind::Ydag, q});
  }
  return c;
}

Mat circuit_unitary(const Circuit& c) {
  const int d = 1 << c.n_qubits;
  Mat out = Mat::Identity(d, d);
  for (const auto& g : c.gates) {
    out = (out * gate_matrix(g, c.n_qubits)).eval();
  }
  return out;
}

double coefficient_to_angle(double c, int dim) {
  return c / std::sqrt(static_cast<double>(dim));
}

Circuit synthesize_coefficients(const RVec& c, const HorizontalBasis& basis,
                                double cutoff) {
  if (c.size() != basis.m()) throw std::invalid_argument("synthesize_coefficients: length mismatch");
  Circuit out;
  out.n_qubits = basis.n;
  for (int a = 0; a < basis.m(); ++a) {
    if (std::abs(c[a]) < cutoff) continue;
    Circuit term = synthesize_exponential(basis.strings[a],
                                          coefficient_to_angle(c[a], basis.dim()));
    out.gates.insert(out.gates.end(), term.gates.begin(), term.gates.end());
  }
  return out;
}

std::string emit_circuit_text(const Circuit& c) {
  std::string out = "# geoqc-circuit v1 n=" + std::to_string(c.n_qubits) + "\n";
  char buf[64];
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::CNOT:
        out += "CNOT q" + std::to_string(g.q0) + " q" + std::to_string(g.q1) + "\n";
        break;
      case GateKind::R3:
        std::snprintf(buf, sizeof(buf), "%.17g", g.angle);
        out += "R3 q" + std::to_string(g.q0) + " " + buf + "\n";
        break;
      default:
        out += std::string(kind_name(g.kind)) + " q" + std::to_string(g.q0) + "\n";
        break;
    }
  }
  return out;
}

Circuit parse_circuit_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  Circuit c;
  bool have_header = false;

  auto parse_qubit = [&](const std::string& tok) {
    if (tok.size() < 2 || tok[0] != 'q') throw ParseError("expected qubit token", lineno);
    return std::stoi(tok.substr(1));
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# geoqc-circuit v1 n=", 0) == 0) {
        c.n_qubits = std::stoi(line.substr(21));
        have_header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    std::string op, a, b;
    ls >> op >> a;
    Gate g{};
    if (op == "CNOT") {
      ls >> b;
      g = {GateKind::CNOT, parse_qubit(a), parse_qubit(b)};
    } else if (op == "R3") {
      ls >> b;
      if (b.empty()) throw ParseError("R3 needs an angle", lineno);
      g = {GateKind::R3, parse_qubit(a), -1, std::stod(b)};
    } else if (op == "H") {
      g = {GateKind::H, parse_qubit(a)};
    } else if (op == "HDAG") {
      g = {GateKind::Hdag, parse_qubit(a)};
    } else if (op == "Y") {
      g = {GateKind::Y, parse_qubit(a)};
    } else if (op == "YDAG") {
      g = {GateKind::Ydag, parse_qubit(a)};
    } else {
      throw ParseError("unknown gate '" + op + "'", lineno);
    }
    c.gates.push_back(g);
  }
  if (!have_header) throw ParseError("missing geoqc-circuit header");
  return c;
}

}  // namespace geoqc
