#pragma once

#include <complex>

#include <Eigen/Dense>

namespace dbi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Absolute entrywise tolerance for Hermiticity / unitarity checks.
inline constexpr double kHermitianTol = 1e-9;

// max_ij |a_ij - conj(a_ji)|
double hermiticity_defect(const Matrix& a);
// max_ij |a_ij + conj(a_ji)|
double antihermiticity_defect(const Matrix& a);
// max_ij |(u'u - I)_ij|
double unitarity_defect(const Matrix& u);

void require_square(const Matrix& a, const char* who);
void require_hermitian(const Matrix& a, const char* who);
void require_antihermitian(const Matrix& a, const char* who);
void require_unitary(const Matrix& u, const char* who);

// Hilbert-Schmidt inner product Tr(a' b).
Complex hs_inner(const Matrix& a, const Matrix& b);
// Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const Matrix& a);

// Diagonal restriction: keep the diagonal, zero everything else.
Matrix delta_restrict(const Matrix& a);
// Off-diagonal restriction: a - delta_restrict(a).
Matrix sigma_restrict(const Matrix& a);

Matrix commutator(const Matrix& a, const Matrix& b);

struct EighResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // column k pairs with eigenvalues[k]
};

// Dense Hermitian eigendecomposition. Input is symmetrized before solving;
// throws std::invalid_argument beyond kHermitianTol.
EighResult eigh(const Matrix& a);

// U(t) = e^{-i t h} for Hermitian h, with the eigendecomposition cached so
// sampling many t is cheap.
class HermitianEvolution {
 public:
  explicit HermitianEvolution(const Matrix& h);
  Matrix at(double t) const;

 private:
  EighResult eig_;
};

// e^{s w} for anti-Hermitian w; the result is unitary.
Matrix expm_antihermitian(const Matrix& w, double s);

// u h u'
Matrix conjugate(const Matrix& h, const Matrix& u);

// Computational basis vector |index> in dimension dim.
Vector basis_state(Eigen::Index dim, Eigen::Index index);

}  // namespace dbi
