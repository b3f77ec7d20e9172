#pragma once

#include <string_view>

#include "dbi/linalg.hpp"

namespace dbi {

Matrix pauli_i();
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// Tensor product of single-qubit Paulis from letters in {I, X, Y, Z}.
// letters[0] acts on qubit 1, which owns the most significant bit of the
// computational-basis index.
Matrix pauli_string(int n_qubits, std::string_view letters);

// Transverse-field Ising chain with periodic bonds:
//   sum_j X_j X_{j+1} + field * sum_j Z_j
Matrix tfim(int n_qubits, double field);

// XXZ Heisenberg chain with periodic bonds:
//   sum_j (X_j X_{j+1} + Y_j Y_{j+1} + anisotropy * Z_j Z_{j+1})
Matrix xxz(int n_qubits, double anisotropy);

}  // namespace dbi
