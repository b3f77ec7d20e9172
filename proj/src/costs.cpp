#include "dbi/costs.hpp"

#include <cmath>
#include <stdexcept>

namespace dbi {
namespace {

constexpr double kDiagonalTol = 1e-12;
constexpr double kRadicandSlack = 1e-10;

void require_diagonal(const Matrix& d, const char* who) {
  require_square(d, who);
  if (hs_norm(sigma_restrict(d)) > kDiagonalTol)
    throw std::invalid_argument(std::string(who) + ": matrix must be diagonal");
}

void require_normalized(const Vector& psi, const char* who) {
  if (std::abs(psi.norm() - 1.0) > kHermitianTol)
    throw std::invalid_argument(std::string(who) + ": state must be normalized");
}

void require_state_dim(const Matrix& h, const Vector& psi, const char* who) {
  if (psi.size() != h.rows())
    throw std::invalid_argument(std::string(who) + ": state dimension mismatch");
}

}  // namespace

double f1_off_diagonal_norm(const Matrix& h) {
  require_square(h, "f1_off_diagonal_norm");
  return hs_norm(sigma_restrict(h));
}

double f2_least_squares(const Matrix& h, const Matrix& d) {
  require_square(h, "f2_least_squares");
  require_diagonal(d, "f2_least_squares");
  if (d.rows() != h.rows())
    throw std::invalid_argument("f2_least_squares: dimension mismatch");
  const double cross = (h.diagonal().cwiseProduct(d.diagonal())).sum().real();
  return 0.5 * hs_norm(d) * hs_norm(d) - cross;
}

double f3_energy(const Matrix& h, const Vector& psi) {
  require_square(h, "f3_energy");
  require_state_dim(h, psi, "f3_energy");
  require_normalized(psi, "f3_energy");
  return psi.dot(h * psi).real();
}

double f4_energy_fluctuation(const Matrix& h, const Vector& psi) {
  require_square(h, "f4_energy_fluctuation");
  require_state_dim(h, psi, "f4_energy_fluctuation");
  require_normalized(psi, "f4_energy_fluctuation");
  const Vector hpsi = h * psi;
  const double second = hpsi.squaredNorm();
  const double first = psi.dot(hpsi).real();
  double radicand = second - first * first;
  if (radicand < 0.0) {
    if (radicand < -kRadicandSlack)
      throw std::runtime_error("f4_energy_fluctuation: variance is negative beyond round-off");
    radicand = 0.0;
  }
  return std::sqrt(radicand);
}

CostFunction cost_f1() { return {CostKind::OffDiagonalNorm, {}, {}}; }

CostFunction cost_f2(Matrix reference_d) {
  return {CostKind::LeastSquares, std::move(reference_d), {}};
}

CostFunction cost_f3(Vector reference_state) {
  return {CostKind::Energy, {}, std::move(reference_state)};
}

CostFunction cost_f4(Vector reference_state) {
  return {CostKind::EnergyFluctuation, {}, std::move(reference_state)};
}

const char* cost_name(CostKind kind) {
  switch (kind) {
    case CostKind::OffDiagonalNorm: return "f1";
    case CostKind::LeastSquares: return "f2";
    case CostKind::Energy: return "f3";
    case CostKind::EnergyFluctuation: return "f4";
  }
  return "?";
}

double evaluate(const CostFunction& cost, const Matrix& h) {
  switch (cost.kind) {
    case CostKind::OffDiagonalNorm:
      return f1_off_diagonal_norm(h);
    case CostKind::LeastSquares:
      if (cost.reference_d.size() == 0)
        throw std::invalid_argument("evaluate: least-squares cost needs a reference diagonal");
      return f2_least_squares(h, cost.reference_d);
    case CostKind::Energy:
    case CostKind::EnergyFluctuation: {
      const Vector psi = cost.reference_state.size() > 0 ? cost.reference_state
                                                         : basis_state(h.rows(), 0);
      return cost.kind == CostKind::Energy ? f3_energy(h, psi)
                                           : f4_energy_fluctuation(h, psi);
    }
  }
  throw std::invalid_argument("evaluate: unknown cost kind");
}

}  // namespace dbi
