#pragma once

#include <utility>
#include <vector>

#include "dbi/dbr.hpp"

namespace dbi {

enum class FormulaKind { GroupCommutator, Hopf };

// Golden-ratio coefficient (sqrt(5) - 1)/2 used by the higher-order formula.
inline constexpr double kHopfPhi = 0.6180339887498949;

// e^{i sqrt(s) H} e^{-i sqrt(s) D} e^{-i sqrt(s) H} e^{i sqrt(s) D}
Matrix gc_unitary(const Matrix& h, const Matrix& d, double s);

// e^{i phi sqrt(s) H} e^{-i phi sqrt(s) D} e^{-i sqrt(s) H}
//   e^{i (phi+1) sqrt(s) D} e^{i (1-phi) sqrt(s) H} e^{-i sqrt(s) D}
Matrix hopf_unitary(const Matrix& h, const Matrix& d, double s);

// One rotation step driven by the chosen product formula's unitary V, which
// approximates R(s) = e^{-sW}: the update is V' h V, symmetrized.
Matrix formula_dbr_step(const Matrix& h, const Matrix& d, double s, FormulaKind kind);

// hs_norm(v - r) between two equally sized unitaries.
double approx_error(const Matrix& v, const Matrix& r);

// Hamiltonian-evolution queries consumed per step: 2 for the group
// commutator, 3 for the higher-order formula.
int hamiltonian_queries(FormulaKind kind);

// Least-squares slope of log(approx_error(V(s), R(s))) against log(s) on a
// log-spaced grid; samples under the round-off floor are discarded.
struct ErrorSlopeFit {
  double slope = 0.0;
  std::vector<std::pair<double, double>> samples;  // (s, error)
};

ErrorSlopeFit error_order_fit(const Matrix& h, const Matrix& d, FormulaKind kind,
                              double s_lo = 1e-4, double s_hi = 1e-1, int n_points = 9);

}  // namespace dbi
