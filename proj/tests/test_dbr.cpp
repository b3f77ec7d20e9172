#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "dbi/costs.hpp"
#include "dbi/dbr.hpp"
#include "dbi/hamiltonians.hpp"

using namespace dbi;

TEST_CASE("bracket of Z with X") {
  const Matrix w = bracket(pauli_z(), pauli_x());  // [Z, X] = 2iY
  CHECK(hs_norm(w - Complex(0, 2) * pauli_y()) < 1e-14);
  CHECK(antihermiticity_defect(w) < 1e-14);
}

TEST_CASE("bracket validation") {
  CHECK_THROWS_AS(bracket(pauli_x(), pauli_z()), std::invalid_argument);  // not diagonal
  Matrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(bracket(pauli_z(), bad), std::invalid_argument);
  CHECK_THROWS_AS(bracket(pauli_z(), Matrix::Identity(4, 4)), std::invalid_argument);
}

TEST_CASE("nested commutators") {
  const Matrix w = Complex(0, 2) * pauli_y();
  const auto gammas = nested_commutators(w, pauli_x(), 2);
  REQUIRE(gammas.size() == 3);
  CHECK(hs_norm(gammas[0] - pauli_x()) < 1e-14);
  // [2iY, X] = 4Z
  CHECK(hs_norm(gammas[1] - 4.0 * pauli_z()) < 1e-14);
  // [2iY, 4Z] = -16X
  CHECK(hs_norm(gammas[2] + 16.0 * pauli_x()) < 1e-14);
  CHECK_THROWS_AS(nested_commutators(w, pauli_x(), -1), std::invalid_argument);
}

TEST_CASE("zero duration returns the input") {
  const Matrix h = tfim(3, 2.0);
  CHECK(hs_norm(dbr_step(h, delta_restrict(h), 0.0) - h) < 1e-14);
}

TEST_CASE("rotation is isospectral and norm preserving") {
  const Matrix h = tfim(3, 2.0);
  const Matrix out = dbr_step(h, delta_restrict(h), 0.3);
  CHECK(hermiticity_defect(out) < 1e-12);
  CHECK(hs_norm(out) == doctest::Approx(hs_norm(h)).epsilon(1e-12));
  const auto before = eigh(h).eigenvalues;
  const auto after = eigh(out).eigenvalues;
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rescaling and shift invariance of the rotation") {
  const Matrix h = xxz(3, 0.5);
  const Matrix d = delta_restrict(h);
  const Matrix reference = dbr_step(h, d, 0.2);
  const Matrix eye = Matrix::Identity(h.rows(), h.cols());
  for (double r : {0.5, 2.0, 10.0})
    for (double z : {-1.0, 3.0}) {
      const Matrix scaled = dbr_step(h, r * d + z * eye, 0.2 / r);
      CHECK(hs_norm(scaled - reference) <= 1e-10);
    }
}

TEST_CASE("curve agrees with the explicit exponential") {
  const Matrix h = tfim(3, 2.0);
  const Matrix d = delta_restrict(h);
  const Matrix w = bracket(d, h);
  const DbrCurve curve(h, d);
  for (double s : {0.05, 0.4, 1.3}) {
    const Matrix u = expm_antihermitian(w, s);
    CHECK(hs_norm(curve.at(s) - conjugate(h, u)) < 1e-11);
    CHECK(hs_norm(curve.rotation(s) - expm_antihermitian(w, -s)) < 1e-11);
    CHECK((curve.diagonal_at(s) - Vector(curve.at(s).diagonal())).norm() < 1e-11);
  }
  CHECK(hs_norm(curve.base() - h) == 0.0);
}

TEST_CASE("small canonical rotation reduces the off-diagonal norm") {
  const Matrix h = tfim(5, 3.0);
  const double before = f1_off_diagonal_norm(h);
  const double after = f1_off_diagonal_norm(dbr_step(h, delta_restrict(h), 1e-3));
  CHECK(after < before);
}
