#pragma once

#include "dbi/linalg.hpp"

namespace dbi {

// ||sigma(h)||_HS: off-diagonal Hilbert-Schmidt norm.
double f1_off_diagonal_norm(const Matrix& h);

// 0.5*||d||^2 - Tr(h d) for diagonal Hermitian d: least-squares proximity
// of h to the target diagonal.
double f2_least_squares(const Matrix& h, const Matrix& d);

// <psi|h|psi> for a normalized state.
double f3_energy(const Matrix& h, const Vector& psi);

// sqrt(<h^2> - <h>^2); round-off slightly below zero is clamped, anything
// worse is a numerical fault.
double f4_energy_fluctuation(const Matrix& h, const Vector& psi);

enum class CostKind { OffDiagonalNorm, LeastSquares, Energy, EnergyFluctuation };

struct CostFunction {
  CostKind kind = CostKind::OffDiagonalNorm;
  Matrix reference_d;      // LeastSquares target; required for that kind
  Vector reference_state;  // Energy / EnergyFluctuation; empty means |0...0>
};

CostFunction cost_f1();
CostFunction cost_f2(Matrix reference_d);
CostFunction cost_f3(Vector reference_state = {});
CostFunction cost_f4(Vector reference_state = {});

const char* cost_name(CostKind kind);  // "f1" .. "f4"

double evaluate(const CostFunction& cost, const Matrix& h);

}  // namespace dbi
