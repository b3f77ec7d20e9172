#include "dbi/dbr.hpp"

#include <stdexcept>

namespace dbi {
namespace {

constexpr double kDiagonalTol = 1e-12;

}  // namespace

Matrix bracket(const Matrix& d, const Matrix& h) {
  require_hermitian(h, "bracket");
  require_hermitian(d, "bracket");
  if (hs_norm(sigma_restrict(d)) > kDiagonalTol)
    throw std::invalid_argument("bracket: generator must be diagonal");
  if (d.rows() != h.rows())
    throw std::invalid_argument("bracket: dimension mismatch");
  return commutator(d, h);
}

Matrix dbr_step(const Matrix& h, const Matrix& d, double s) {
  return DbrCurve(h, d).at(s);
}

std::vector<Matrix> nested_commutators(const Matrix& w, const Matrix& h, int n_max) {
  if (n_max < 0)
    throw std::invalid_argument("nested_commutators: n_max must be nonnegative");
  std::vector<Matrix> gammas;
  gammas.reserve(static_cast<std::size_t>(n_max) + 1);
  gammas.push_back(h);
  for (int n = 1; n <= n_max; ++n)
    gammas.push_back(commutator(w, gammas.back()));
  return gammas;
}

DbrCurve::DbrCurve(const Matrix& h, const Matrix& d)
    : h_(h), eig_(eigh(Complex(0.0, 1.0) * bracket(d, h))) {
  m_ = eig_.eigenvectors.adjoint() * h_ * eig_.eigenvectors;
}

// e^{sW} = e^{-i s g} with g = iW, so in g's eigenbasis the conjugated h
// picks up the phase pattern e^{-i s (lambda_j - lambda_k)} = u_j conj(u_k).
Vector DbrCurve::phases(double s) const {
  return (Complex(0.0, -s) * eig_.eigenvalues.array().cast<Complex>()).exp().matrix();
}

Matrix DbrCurve::at(double s) const {
  const Vector u = phases(s);
  const Matrix rotated = eig_.eigenvectors * (u * u.adjoint()).cwiseProduct(m_) *
                         eig_.eigenvectors.adjoint();
  return (rotated + rotated.adjoint()) / 2.0;
}

Vector DbrCurve::diagonal_at(double s) const {
  const Vector u = phases(s);
  const Matrix va = eig_.eigenvectors * (u * u.adjoint()).cwiseProduct(m_);
  // diag(V A V^dagger) without forming the full product; real to round-off.
  return va.cwiseProduct(eig_.eigenvectors.conjugate())
      .rowwise()
      .sum()
      .real()
      .cast<Complex>();
}

Matrix DbrCurve::rotation(double s) const {
  const Vector u = phases(-s);
  return eig_.eigenvectors * u.asDiagonal() * eig_.eigenvectors.adjoint();
}

}  // namespace dbi
