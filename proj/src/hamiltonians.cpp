#include "dbi/hamiltonians.hpp"

#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace dbi {
namespace {

Matrix single_pauli(char letter) {
  Matrix m(2, 2);
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
    case 'Z': m << 1, 0, 0, -1; break;
    default:
      throw std::invalid_argument(std::string("pauli_string: unknown letter '") + letter + "'");
  }
  return m;
}

// One- or two-site term embedded in the L-qubit chain; sites are 1-based.
Matrix chain_term(int n_qubits, int site_a, char op_a, int site_b = 0, char op_b = 'I') {
  std::string letters(static_cast<std::size_t>(n_qubits), 'I');
  letters[site_a - 1] = op_a;
  if (site_b > 0) letters[site_b - 1] = op_b;
  return pauli_string(n_qubits, letters);
}

}  // namespace

Matrix pauli_i() { return single_pauli('I'); }
Matrix pauli_x() { return single_pauli('X'); }
Matrix pauli_y() { return single_pauli('Y'); }
Matrix pauli_z() { return single_pauli('Z'); }

Matrix pauli_string(int n_qubits, std::string_view letters) {
  if (n_qubits < 1)
    throw std::invalid_argument("pauli_string: need at least one qubit");
  if (static_cast<int>(letters.size()) != n_qubits)
    throw std::invalid_argument("pauli_string: letter count must equal qubit count");
  Matrix out = single_pauli(letters[0]);
  for (int j = 1; j < n_qubits; ++j)
    out = Eigen::kroneckerProduct(out, single_pauli(letters[j])).eval();
  return out;
}

Matrix tfim(int n_qubits, double field) {
  if (n_qubits < 2)
    throw std::invalid_argument("tfim: need at least two qubits");
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Matrix h = Matrix::Zero(dim, dim);
  for (int j = 1; j <= n_qubits; ++j) {
    const int next = j % n_qubits + 1;
    h += chain_term(n_qubits, j, 'X', next, 'X');
    h += field * chain_term(n_qubits, j, 'Z');
  }
  return h;
}

Matrix xxz(int n_qubits, double anisotropy) {
  if (n_qubits < 2)
    throw std::invalid_argument("xxz: need at least two qubits");
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Matrix h = Matrix::Zero(dim, dim);
  for (int j = 1; j <= n_qubits; ++j) {
    const int next = j % n_qubits + 1;
    h += chain_term(n_qubits, j, 'X', next, 'X');
    h += chain_term(n_qubits, j, 'Y', next, 'Y');
    h += anisotropy * chain_term(n_qubits, j, 'Z', next, 'Z');
  }
  return h;
}

}  // namespace dbi
