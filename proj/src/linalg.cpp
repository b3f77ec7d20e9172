#include "dbi/linalg.hpp"

#include <stdexcept>
#include <string>

namespace dbi {

double hermiticity_defect(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double antihermiticity_defect(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return (a + a.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Matrix& u) {
  if (u.size() == 0) return 0.0;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": expected a nonempty square matrix");
}

void require_hermitian(const Matrix& a, const char* who) {
  require_square(a, who);
  if (hermiticity_defect(a) > kHermitianTol)
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
}

void require_antihermitian(const Matrix& a, const char* who) {
  require_square(a, who);
  if (antihermiticity_defect(a) > kHermitianTol)
    throw std::invalid_argument(std::string(who) + ": matrix is not anti-Hermitian");
}

void require_unitary(const Matrix& u, const char* who) {
  require_square(u, who);
  if (unitarity_defect(u) > kHermitianTol)
    throw std::invalid_argument(std::string(who) + ": matrix is not unitary");
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("hs_inner: dimension mismatch");
  return a.conjugate().cwiseProduct(b).sum();
}

double hs_norm(const Matrix& a) { return a.norm(); }

Matrix delta_restrict(const Matrix& a) {
  require_square(a, "delta_restrict");
  return Matrix(a.diagonal().asDiagonal());
}

Matrix sigma_restrict(const Matrix& a) {
  Matrix out = a;
  require_square(a, "sigma_restrict");
  out.diagonal().setZero();
  return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw std::invalid_argument("commutator: expected equal square matrices");
  return a * b - b * a;
}

EighResult eigh(const Matrix& a) {
  require_hermitian(a, "eigh");
  const Matrix sym = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigh: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianEvolution::HermitianEvolution(const Matrix& h) : eig_(eigh(h)) {}

Matrix HermitianEvolution::at(double t) const {
  const Vector phases =
      (Complex(0.0, -t) * eig_.eigenvalues.cast<Complex>().array()).exp();
  return eig_.eigenvectors * phases.asDiagonal() * eig_.eigenvectors.adjoint();
}

Matrix expm_antihermitian(const Matrix& w, double s) {
  require_antihermitian(w, "expm_antihermitian");
  // e^{s w} = e^{-i s (i w)} with i w Hermitian.
  return HermitianEvolution(Complex(0.0, 1.0) * w).at(s);
}

Matrix conjugate(const Matrix& h, const Matrix& u) {
  if (h.rows() != u.rows() || h.cols() != u.cols())
    throw std::invalid_argument("conjugate: dimension mismatch");
  require_unitary(u, "conjugate");
  return u * h * u.adjoint();
}

Vector basis_state(Eigen::Index dim, Eigen::Index index) {
  if (dim < 1 || index < 0 || index >= dim)
    throw std::invalid_argument("basis_state: index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = Complex(1.0, 0.0);
  return v;
}

}  // namespace dbi
