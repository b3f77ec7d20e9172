#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dbi/hamiltonians.hpp"

using namespace dbi;

TEST_CASE("single-qubit paulis") {
  CHECK(hs_norm(pauli_x() * pauli_x() - Matrix::Identity(2, 2)) < 1e-15);
  CHECK(hs_norm(pauli_y() * pauli_y() - Matrix::Identity(2, 2)) < 1e-15);
  CHECK(hs_norm(pauli_z() * pauli_z() - Matrix::Identity(2, 2)) < 1e-15);
  // XY = iZ
  CHECK(hs_norm(pauli_x() * pauli_y() - Complex(0, 1) * pauli_z()) < 1e-15);
  CHECK(hs_norm(pauli_i() - Matrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("letter order: the first letter owns the most significant bit") {
  const Matrix zi = pauli_string(2, "ZI");
  CHECK(zi(0, 0) == Complex(1, 0));
  CHECK(zi(1, 1) == Complex(1, 0));
  CHECK(zi(2, 2) == Complex(-1, 0));
  CHECK(zi(3, 3) == Complex(-1, 0));

  const Matrix iz = pauli_string(2, "IZ");
  CHECK(iz(0, 0) == Complex(1, 0));
  CHECK(iz(1, 1) == Complex(-1, 0));
  CHECK(iz(2, 2) == Complex(1, 0));
  CHECK(iz(3, 3) == Complex(-1, 0));

  CHECK(hs_norm(pauli_string(1, "X") - pauli_x()) < 1e-15);
}

TEST_CASE("pauli_string validation") {
  CHECK_THROWS_AS(pauli_string(2, "XYZ"), std::invalid_argument);
  CHECK_THROWS_AS(pauli_string(2, "XA"), std::invalid_argument);
  CHECK_THROWS_AS(pauli_string(0, ""), std::invalid_argument);
}

TEST_CASE("two-site transverse-field chain in closed form") {
  const Matrix h = tfim(2, 3.0);
  CHECK(hermiticity_defect(h) < 1e-15);
  // periodic two-site ring doubles the single bond: 2 XX + 3(ZI + IZ)
  CHECK(h(0, 0) == Complex(6, 0));
  CHECK(h(3, 3) == Complex(-6, 0));
  CHECK(h(1, 1) == Complex(0, 0));
  CHECK(h(0, 3) == Complex(2, 0));
  CHECK(h(1, 2) == Complex(2, 0));
  CHECK(h(0, 1) == Complex(0, 0));

  const auto eig = eigh(h);
  CHECK(eig.eigenvalues[0] == doctest::Approx(-std::sqrt(40.0)));
  CHECK(eig.eigenvalues[1] == doctest::Approx(-2.0));
  CHECK(eig.eigenvalues[2] == doctest::Approx(2.0));
  CHECK(eig.eigenvalues[3] == doctest::Approx(std::sqrt(40.0)));
}

TEST_CASE("five-site transverse-field chain invariants") {
  const Matrix h = tfim(5, 3.0);
  CHECK(h.rows() == 32);
  CHECK(hermiticity_defect(h) < 1e-15);
  CHECK(std::abs(h.trace()) < 1e-12);
  CHECK(hs_norm(h) * hs_norm(h) == doctest::Approx(1600.0));
  CHECK(hs_norm(sigma_restrict(h)) == doctest::Approx(std::sqrt(160.0)));
}

TEST_CASE("xxz chain invariants") {
  const Matrix h2 = xxz(2, 0.5);
  CHECK(hs_norm(sigma_restrict(h2)) == doctest::Approx(std::sqrt(32.0)));
  // doubled bond: diagonal 2*0.5*ZZ, off-diagonal 2(XX + YY)
  CHECK(h2(0, 0) == Complex(1, 0));
  CHECK(h2(1, 1) == Complex(-1, 0));
  CHECK(h2(1, 2) == Complex(4, 0));
  CHECK(h2(0, 3) == Complex(0, 0));

  const Matrix h5 = xxz(5, 0.5);
  CHECK(hermiticity_defect(h5) < 1e-15);
  CHECK(hs_norm(sigma_restrict(h5)) == doctest::Approx(std::sqrt(320.0)));
}

TEST_CASE("chain models need at least two sites") {
  CHECK_THROWS_AS(tfim(1, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(xxz(1, 0.5), std::invalid_argument);
}
