#pragma once

#include <vector>

#include "dbi/linalg.hpp"

namespace dbi {

// W = d h - h d for diagonal Hermitian d and Hermitian h; anti-Hermitian.
Matrix bracket(const Matrix& d, const Matrix& h);

// One rotation e^{sW} h e^{-sW} with W = bracket(d, h); the result is
// symmetrized to arrest round-off drift.
Matrix dbr_step(const Matrix& h, const Matrix& d, double s);

// Nested commutators G_0 = h, G_n = [w, G_{n-1}] for n = 0..n_max.
std::vector<Matrix> nested_commutators(const Matrix& w, const Matrix& h, int n_max);

// The curve s -> e^{sW} h e^{-sW} for fixed (h, d), with the spectral
// factorization of W computed once so sampling many s is cheap: in the
// eigenbasis of iW the rotation is an elementwise phase pattern.
class DbrCurve {
 public:
  DbrCurve(const Matrix& h, const Matrix& d);

  // Rotated Hamiltonian at flow duration s.
  Matrix at(double s) const;
  // Its diagonal only, at half the cost of at().
  Vector diagonal_at(double s) const;
  // R(s) = e^{-sW}, the unitary the rotation conjugates by.
  Matrix rotation(double s) const;

  const Matrix& base() const { return h_; }

 private:
  Vector phases(double s) const;

  Matrix h_;
  EighResult eig_;  // of the Hermitian i W
  Matrix m_;        // h in that eigenbasis
};

}  // namespace dbi
