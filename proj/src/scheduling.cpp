#include "dbi/scheduling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dbi/rng.hpp"

namespace dbi {
namespace {

void check_search_config(const ScheduleConfig& config, const char* who) {
  if (config.s_max <= 0.0)
    throw std::invalid_argument(std::string(who) + ": s_max must be positive");
  if (config.n_points < 1)
    throw std::invalid_argument(std::string(who) + ": n_points must be positive");
}

ScheduleResult best_over_samples(const Matrix& h, const Matrix& d,
                                 const CostFunction& cost,
                                 const std::vector<double>& samples) {
  const DbrCurve curve(h, d);
  const double cost0 = evaluate(cost, h);
  double best_s = samples.front();
  double best_cost = std::numeric_limits<double>::infinity();
  // Reduce by (cost, s): ties resolve to the smallest duration.
  const auto consider = [&](double s, double c) {
    if (c < best_cost || (c == best_cost && s < best_s)) {
      best_cost = c;
      best_s = s;
    }
  };
  if (cost.kind == CostKind::OffDiagonalNorm) {
    // The HS norm is conserved along the rotation, so the off-diagonal norm
    // follows from the rotated diagonal alone at half the conjugation cost.
    const double total_sq = h.squaredNorm();
    for (double s : samples)
      consider(s, std::sqrt(std::max(0.0, total_sq - curve.diagonal_at(s).squaredNorm())));
  } else {
    for (double s : samples) consider(s, evaluate(cost, curve.at(s)));
  }
  return {best_s, best_cost, !(best_cost < cost0)};
}

}  // namespace

double SigmaPolynomial::operator()(double s) const {
  return polynomial_eval(coefficients, s);
}

double polynomial_eval(const RealVector& coefficients, double x) {
  double acc = 0.0;
  for (Eigen::Index k = coefficients.size() - 1; k >= 0; --k)
    acc = acc * x + coefficients[k];
  return acc;
}

RealVector polynomial_derivative(const RealVector& coefficients) {
  if (coefficients.size() <= 1) return RealVector::Zero(1);
  RealVector out(coefficients.size() - 1);
  for (Eigen::Index k = 1; k < coefficients.size(); ++k)
    out[k - 1] = static_cast<double>(k) * coefficients[k];
  return out;
}

std::vector<Complex> polynomial_roots(const RealVector& coefficients) {
  const double scale = coefficients.size() ? coefficients.cwiseAbs().maxCoeff() : 0.0;
  Eigen::Index degree = coefficients.size() - 1;
  while (degree > 0 && std::abs(coefficients[degree]) <= 1e-14 * scale) --degree;
  if (degree <= 0) return {};

  RealMatrix companion = RealMatrix::Zero(degree, degree);
  companion.bottomLeftCorner(degree - 1, degree - 1).setIdentity();
  for (Eigen::Index k = 0; k < degree; ++k)
    companion(k, degree - 1) = -coefficients[k] / coefficients[degree];

  Eigen::EigenSolver<RealMatrix> solver(companion);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("polynomial_roots: companion eigensolver failed");
  std::vector<Complex> roots(static_cast<std::size_t>(degree));
  for (Eigen::Index k = 0; k < degree; ++k) roots[static_cast<std::size_t>(k)] = solver.eigenvalues()[k];
  return roots;
}

ScheduleResult grid_search(const Matrix& h, const Matrix& d,
                           const CostFunction& cost, const ScheduleConfig& config) {
  check_search_config(config, "grid_search");
  std::vector<double> samples(static_cast<std::size_t>(config.n_points));
  for (int i = 1; i <= config.n_points; ++i)
    samples[static_cast<std::size_t>(i - 1)] = config.s_max * i / config.n_points;
  // Ascending scan with strict improvement: ties resolve to the smallest s.
  return best_over_samples(h, d, cost, samples);
}

ScheduleResult random_search(const Matrix& h, const Matrix& d,
                             const CostFunction& cost, const ScheduleConfig& config) {
  check_search_config(config, "random_search");
  if (!config.rng_seed)
    throw std::invalid_argument("random_search: rng_seed must be set");
  std::mt19937_64 rng(*config.rng_seed);
  std::vector<double> samples(static_cast<std::size_t>(config.n_points));
  for (auto& s : samples) s = config.s_max * (1.0 - uniform_unit(rng));  // (0, s_max]
  return best_over_samples(h, d, cost, samples);
}

SigmaPolynomial sigma_polynomial(const Matrix& h, const Matrix& d, int order) {
  if (order < 2)
    throw std::invalid_argument("sigma_polynomial: order must be at least 2");
  const Matrix w = bracket(d, h);
  const auto gammas = nested_commutators(w, h, order);
  std::vector<Matrix> sigmas;
  sigmas.reserve(gammas.size());
  for (const auto& g : gammas) sigmas.push_back(sigma_restrict(g));

  std::vector<double> factorial(static_cast<std::size_t>(order) + 1, 1.0);
  for (std::size_t n = 1; n < factorial.size(); ++n)
    factorial[n] = factorial[n - 1] * static_cast<double>(n);

  RealVector c = RealVector::Zero(order + 1);
  for (int m = 0; m <= order; ++m)
    for (int i = std::max(0, m - order); i <= std::min(m, order); ++i) {
      const int j = m - i;
      c[m] += hs_inner(sigmas[static_cast<std::size_t>(i)],
                       sigmas[static_cast<std::size_t>(j)])
                  .real() /
              (factorial[static_cast<std::size_t>(i)] * factorial[static_cast<std::size_t>(j)]);
    }
  return {c};
}

std::optional<double> polynomial_first_local_min(const SigmaPolynomial& poly,
                                                 double s_max) {
  if (s_max <= 0.0)
    throw std::invalid_argument("polynomial_first_local_min: s_max must be positive");
  const RealVector deriv = polynomial_derivative(poly.coefficients);
  const RealVector second = polynomial_derivative(deriv);
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& root : polynomial_roots(deriv)) {
    if (std::abs(root.imag()) >= 1e-9) continue;
    const double s = root.real();
    if (s <= 0.0 || s > s_max) continue;
    if (polynomial_eval(second, s) > 0.0 && s < best) best = s;
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

ScheduleResult schedule(const Matrix& h, const Matrix& d,
                        const CostFunction& cost, const ScheduleConfig& config) {
  switch (config.strategy) {
    case ScheduleStrategy::Grid:
      return grid_search(h, d, cost, config);
    case ScheduleStrategy::Random:
      return random_search(h, d, cost, config);
    case ScheduleStrategy::Taylor: {
      // The series expansion exists for the off-diagonal norm only.
      if (cost.kind != CostKind::OffDiagonalNorm)
        return grid_search(h, d, cost, config);
      const auto poly = sigma_polynomial(h, d, config.poly_order);
      const auto s = polynomial_first_local_min(poly, config.s_max);
      if (!s) {
        if (config.fallback_to_grid) return grid_search(h, d, cost, config);
        throw std::runtime_error(
            "schedule: no polynomial minimum in range and grid fallback disabled");
      }
      const double c = evaluate(cost, dbr_step(h, d, *s));
      return {*s, c, !(c < evaluate(cost, h))};
    }
  }
  throw std::invalid_argument("schedule: unknown strategy");
}

std::optional<CurveMinimum> curve_first_local_min(const Matrix& h, const Matrix& d,
                                                  const CostFunction& cost,
                                                  double s_max, int n_points) {
  if (s_max <= 0.0)
    throw std::invalid_argument("curve_first_local_min: s_max must be positive");
  if (n_points < 3)
    throw std::invalid_argument("curve_first_local_min: need at least 3 points");
  const DbrCurve curve(h, d);
  const auto value = [&](double s) { return evaluate(cost, curve.at(s)); };

  const double step = s_max / n_points;
  double prev = evaluate(cost, h);
  double here = value(step);
  for (int i = 1; i < n_points; ++i) {
    const double next = value(step * (i + 1));
    if (here < prev && here <= next) {
      // Ternary refinement inside the bracketing interval.
      double lo = step * (i - 1), hi = step * (i + 1);
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (value(m1) < value(m2))
          hi = m2;
        else
          lo = m1;
      }
      const double s = 0.5 * (lo + hi);
      return CurveMinimum{s, value(s)};
    }
    prev = here;
    here = next;
  }
  return std::nullopt;
}

}  // namespace dbi
