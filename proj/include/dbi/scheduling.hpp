#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dbi/costs.hpp"
#include "dbi/dbr.hpp"

namespace dbi {

enum class ScheduleStrategy { Grid, Random, Taylor };

struct ScheduleConfig {
  ScheduleStrategy strategy = ScheduleStrategy::Grid;
  double s_max = 1.0;
  int n_points = 200;  // grid size / random sample count
  int poly_order = 5;  // Taylor truncation order, >= 2
  std::optional<std::uint64_t> rng_seed;  // required by the random strategy
  bool fallback_to_grid = true;  // Taylor falls back when no usable minimum
};

// Best duration found and the cost there; no_gain is set when nothing on the
// search set beat the s = 0 cost.
struct ScheduleResult {
  double s = 0.0;
  double cost = 0.0;
  bool no_gain = false;
};

// ||sigma(e^{sW} h e^{-sW})||^2 expanded as a polynomial in s and truncated.
struct SigmaPolynomial {
  RealVector coefficients;  // c_0..c_order, ascending powers
  double operator()(double s) const;
};

double polynomial_eval(const RealVector& coefficients, double x);
RealVector polynomial_derivative(const RealVector& coefficients);
// All complex roots via the companion matrix; trailing coefficients that are
// negligible relative to the largest one are trimmed first.
std::vector<Complex> polynomial_roots(const RealVector& coefficients);

ScheduleResult grid_search(const Matrix& h, const Matrix& d,
                           const CostFunction& cost, const ScheduleConfig& config);

ScheduleResult random_search(const Matrix& h, const Matrix& d,
                             const CostFunction& cost, const ScheduleConfig& config);

SigmaPolynomial sigma_polynomial(const Matrix& h, const Matrix& d, int order);

// Smallest root of the derivative in (0, s_max] with positive curvature.
std::optional<double> polynomial_first_local_min(const SigmaPolynomial& poly,
                                                 double s_max);

// Strategy dispatcher. Taylor scheduling exists only for the off-diagonal
// norm; other costs use the grid, as does a rootless Taylor fit when fallback
// is enabled.
ScheduleResult schedule(const Matrix& h, const Matrix& d,
                        const CostFunction& cost, const ScheduleConfig& config);

struct CurveMinimum {
  double s = 0.0;
  double cost = 0.0;
};

// First local minimum of s -> cost(e^{sW} h e^{-sW}) on (0, s_max]: dense scan
// for the first turning point, then ternary refinement inside its bracket.
std::optional<CurveMinimum> curve_first_local_min(const Matrix& h, const Matrix& d,
                                                  const CostFunction& cost,
                                                  double s_max, int n_points);

}  // namespace dbi
