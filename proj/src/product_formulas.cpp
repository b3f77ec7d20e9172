#include "dbi/product_formulas.hpp"

#include <cmath>
#include <stdexcept>

namespace dbi {
namespace {

constexpr double kErrorFloor = 1e-12;

void check_formula_inputs(const Matrix& h, const Matrix& d, double s, const char* who) {
  if (s < 0.0) throw std::invalid_argument(std::string(who) + ": duration must be nonnegative");
  require_hermitian(h, who);
  require_hermitian(d, who);
  if (hs_norm(sigma_restrict(d)) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": generator must be diagonal");
  if (d.rows() != h.rows()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

Matrix gc_unitary(const Matrix& h, const Matrix& d, double s) {
  check_formula_inputs(h, d, s, "gc_unitary");
  const double rs = std::sqrt(s);
  const HermitianEvolution uh(h), ud(d);
  return uh.at(-rs) * ud.at(rs) * uh.at(rs) * ud.at(-rs);
}

Matrix hopf_unitary(const Matrix& h, const Matrix& d, double s) {
  check_formula_inputs(h, d, s, "hopf_unitary");
  const double rs = std::sqrt(s);
  const double phi = kHopfPhi;
  const HermitianEvolution uh(h), ud(d);
  return uh.at(-phi * rs) * ud.at(phi * rs) * uh.at(rs) * ud.at(-(phi + 1.0) * rs) *
         uh.at(-(1.0 - phi) * rs) * ud.at(rs);
}

Matrix formula_dbr_step(const Matrix& h, const Matrix& d, double s, FormulaKind kind) {
  const Matrix v =
      kind == FormulaKind::GroupCommutator ? gc_unitary(h, d, s) : hopf_unitary(h, d, s);
  const Matrix rotated = v.adjoint() * h * v;
  return (rotated + rotated.adjoint()) / 2.0;
}

double approx_error(const Matrix& v, const Matrix& r) {
  if (v.rows() != r.rows() || v.cols() != r.cols())
    throw std::invalid_argument("approx_error: dimension mismatch");
  return hs_norm(v - r);
}

int hamiltonian_queries(FormulaKind kind) {
  return kind == FormulaKind::GroupCommutator ? 2 : 3;
}

ErrorSlopeFit error_order_fit(const Matrix& h, const Matrix& d, FormulaKind kind,
                              double s_lo, double s_hi, int n_points) {
  if (!(0.0 < s_lo && s_lo < s_hi))
    throw std::invalid_argument("error_order_fit: need 0 < s_lo < s_hi");
  if (n_points < 2) throw std::invalid_argument("error_order_fit: need at least two points");

  const DbrCurve curve(h, d);
  ErrorSlopeFit fit;
  const double log_lo = std::log10(s_lo);
  const double log_hi = std::log10(s_hi);
  double sum_x = 0, sum_y = 0, sum_xx = 0, sum_xy = 0;
  int kept = 0;
  for (int i = 0; i < n_points; ++i) {
    const double s =
        std::pow(10.0, log_lo + (log_hi - log_lo) * i / (n_points - 1));
    const Matrix v = kind == FormulaKind::GroupCommutator ? gc_unitary(h, d, s)
                                                          : hopf_unitary(h, d, s);
    const double err = approx_error(v, curve.rotation(s));
    fit.samples.emplace_back(s, err);
    if (err < kErrorFloor) continue;  // round-off floor
    const double x = std::log(s);
    const double y = std::log(err);
    sum_x += x;
    sum_y += y;
    sum_xx += x * x;
    sum_xy += x * y;
    ++kept;
  }
  if (kept < 2) throw std::runtime_error("error_order_fit: not enough usable samples");
  const double denom = kept * sum_xx - sum_x * sum_x;
  fit.slope = (kept * sum_xy - sum_x * sum_y) / denom;
  return fit;
}

}  // namespace dbi
