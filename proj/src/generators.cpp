#include "dbi/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dbi/rng.hpp"

namespace dbi {
namespace {

bool is_power_of_two(Eigen::Index n) { return n >= 2 && (n & (n - 1)) == 0; }

int qubit_count_for_dim(Eigen::Index dim, const char* who) {
  if (!is_power_of_two(dim))
    throw std::invalid_argument(std::string(who) + ": dimension must be a power of two");
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  return n;
}

Eigen::Index dim_for_qubits(int n_qubits, const char* who) {
  if (n_qubits < 1 || n_qubits > 24)
    throw std::invalid_argument(std::string(who) + ": unsupported qubit count");
  return Eigen::Index(1) << n_qubits;
}

bool is_spectral(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::MinMax:
    case GeneratorKind::MaxMin:
    case GeneratorKind::ShuffledMinMax:
    case GeneratorKind::SampledMinMax:
    case GeneratorKind::EigenSorted:
    case GeneratorKind::Dephasing:
      return true;
    default:
      return false;
  }
}

// Equidistant values lo + i*delta, i = 1..n, covering the context diagonal's
// range with delta = (hi - lo)/n.
RealVector min_max_values(const Matrix& context) {
  const RealVector diag = context.diagonal().real();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  const auto n = diag.size();
  const double delta = (hi - lo) / static_cast<double>(n);
  RealVector vals(n);
  for (Eigen::Index i = 0; i < n; ++i)
    vals[i] = lo + delta * static_cast<double>(i + 1);
  return vals;
}

Matrix diagonal_operator(const RealVector& entries) {
  return Matrix(entries.cast<Complex>().asDiagonal());
}

const Matrix& require_context(const GeneratorSpec& spec, const Matrix& context) {
  if (context.size() == 0)
    throw std::invalid_argument(std::string("realize: ") + kind_name(spec.kind) +
                                " needs a context Hamiltonian");
  require_square(context, "realize");
  return context;
}

}  // namespace

GeneratorSpec spectral_generator(GeneratorKind kind, std::uint64_t seed) {
  if (!is_spectral(kind))
    throw std::invalid_argument("spectral_generator: kind carries explicit parameters");
  GeneratorSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  return spec;
}

GeneratorSpec magnetic_field(RealVector alpha) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::MagneticField;
  spec.alpha = std::move(alpha);
  return spec;
}

GeneratorSpec nn_ising(RealVector alpha, RealVector beta, Boundary boundary) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::NNIsing;
  spec.alpha = std::move(alpha);
  spec.beta = std::move(beta);
  spec.boundary = boundary;
  return spec;
}

GeneratorSpec all_to_all_ising(RealVector alpha, RealMatrix beta_pairs) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::AllToAllIsing;
  spec.alpha = std::move(alpha);
  spec.beta_pairs = std::move(beta_pairs);
  return spec;
}

GeneratorSpec pauli_z_product(std::string mu) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::PauliZProduct;
  spec.mu = std::move(mu);
  return spec;
}

GeneratorSpec full_diagonal(RealVector diagonal) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::FullDiagonal;
  spec.diagonal = std::move(diagonal);
  return spec;
}

const char* kind_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::MinMax: return "minmax";
    case GeneratorKind::MaxMin: return "maxmin";
    case GeneratorKind::ShuffledMinMax: return "shuffled";
    case GeneratorKind::SampledMinMax: return "sampled";
    case GeneratorKind::EigenSorted: return "eigen";
    case GeneratorKind::Dephasing: return "dephasing";
    case GeneratorKind::MagneticField: return "magnetic-field";
    case GeneratorKind::NNIsing: return "nn-ising";
    case GeneratorKind::AllToAllIsing: return "a2a-ising";
    case GeneratorKind::PauliZProduct: return "pauli-z";
    case GeneratorKind::FullDiagonal: return "full-diagonal";
  }
  return "?";
}

std::string generator_tag(const GeneratorSpec& spec) {
  std::string tag = kind_name(spec.kind);
  if (spec.kind == GeneratorKind::PauliZProduct) tag += ":" + spec.mu;
  return tag;
}

RealVector pauli_z_diagonal(int n_qubits, int qubit) {
  const Eigen::Index dim = dim_for_qubits(n_qubits, "pauli_z_diagonal");
  if (qubit < 1 || qubit > n_qubits)
    throw std::invalid_argument("pauli_z_diagonal: qubit out of range");
  RealVector z(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    z[i] = 1.0 - 2.0 * static_cast<double>((i >> (n_qubits - qubit)) & 1);
  return z;
}

Matrix realize(const GeneratorSpec& spec, const Matrix& h_context) {
  switch (spec.kind) {
    case GeneratorKind::MinMax:
      return diagonal_operator(min_max_values(require_context(spec, h_context)));
    case GeneratorKind::MaxMin:
      return diagonal_operator(min_max_values(require_context(spec, h_context)).reverse());
    case GeneratorKind::ShuffledMinMax: {
      const RealVector vals = min_max_values(require_context(spec, h_context));
      std::vector<double> entries(vals.begin(), vals.end());
      std::mt19937_64 rng(spec.seed);
      shuffle_in_place(entries, rng);
      return diagonal_operator(Eigen::Map<const RealVector>(entries.data(),
                                                            static_cast<Eigen::Index>(entries.size())));
    }
    case GeneratorKind::SampledMinMax: {
      const RealVector vals = min_max_values(require_context(spec, h_context));
      std::mt19937_64 rng(spec.seed);
      std::vector<double> entries(static_cast<std::size_t>(vals.size()));
      for (auto& e : entries)
        e = vals[static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(vals.size())))];
      std::sort(entries.begin(), entries.end());
      return diagonal_operator(Eigen::Map<const RealVector>(entries.data(),
                                                            static_cast<Eigen::Index>(entries.size())));
    }
    case GeneratorKind::EigenSorted:
      return diagonal_operator(eigh(require_context(spec, h_context)).eigenvalues);
    case GeneratorKind::Dephasing:
      return delta_restrict(require_context(spec, h_context));
    case GeneratorKind::MagneticField: {
      const int L = static_cast<int>(spec.alpha.size());
      const Eigen::Index dim = dim_for_qubits(L, "realize");
      RealVector d = RealVector::Zero(dim);
      for (int j = 1; j <= L; ++j) d += spec.alpha[j - 1] * pauli_z_diagonal(L, j);
      return diagonal_operator(d);
    }
    case GeneratorKind::NNIsing: {
      const int L = static_cast<int>(spec.alpha.size());
      if (L < 2) throw std::invalid_argument("realize: NN Ising needs at least two qubits");
      const Eigen::Index dim = dim_for_qubits(L, "realize");
      const int bonds = spec.boundary == Boundary::Open ? L - 1 : L;
      if (spec.beta.size() != bonds)
        throw std::invalid_argument("realize: NN Ising bond count mismatch");
      RealVector d = RealVector::Zero(dim);
      for (int j = 1; j <= L; ++j) d += spec.alpha[j - 1] * pauli_z_diagonal(L, j);
      for (int b = 1; b <= bonds; ++b)
        d += spec.beta[b - 1] *
             pauli_z_diagonal(L, b).cwiseProduct(pauli_z_diagonal(L, b % L + 1));
      return diagonal_operator(d);
    }
    case GeneratorKind::AllToAllIsing: {
      const int L = static_cast<int>(spec.alpha.size());
      if (L < 2) throw std::invalid_argument("realize: all-to-all Ising needs at least two qubits");
      const Eigen::Index dim = dim_for_qubits(L, "realize");
      if (spec.beta_pairs.rows() != L || spec.beta_pairs.cols() != L)
        throw std::invalid_argument("realize: all-to-all pair matrix must be L x L");
      RealVector d = RealVector::Zero(dim);
      for (int j = 1; j <= L; ++j) d += spec.alpha[j - 1] * pauli_z_diagonal(L, j);
      for (int j = 1; j <= L; ++j)
        for (int k = j + 1; k <= L; ++k)
          d += spec.beta_pairs(j - 1, k - 1) *
               pauli_z_diagonal(L, j).cwiseProduct(pauli_z_diagonal(L, k));
      return diagonal_operator(d);
    }
    case GeneratorKind::PauliZProduct: {
      const int L = static_cast<int>(spec.mu.size());
      const Eigen::Index dim = dim_for_qubits(L, "realize");
      RealVector d = RealVector::Ones(dim);
      for (int j = 1; j <= L; ++j) {
        const char bit = spec.mu[static_cast<std::size_t>(j - 1)];
        if (bit == '1')
          d = d.cwiseProduct(pauli_z_diagonal(L, j));
        else if (bit != '0')
          throw std::invalid_argument("realize: membership string must be over {0,1}");
      }
      return diagonal_operator(d);
    }
    case GeneratorKind::FullDiagonal: {
      if (spec.diagonal.size() == 0)
        return delta_restrict(require_context(spec, h_context));
      if (!is_power_of_two(spec.diagonal.size()))
        throw std::invalid_argument("realize: diagonal length must be a power of two");
      return diagonal_operator(spec.diagonal);
    }
  }
  throw std::invalid_argument("realize: unknown generator kind");
}

namespace {

bool is_trainable(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::MagneticField:
    case GeneratorKind::NNIsing:
    case GeneratorKind::AllToAllIsing:
    case GeneratorKind::FullDiagonal:
      return true;
    default:
      return false;
  }
}

// Fill in default parameters for a trainable family on an L-qubit problem.
GeneratorSpec defaulted_family(const GeneratorSpec& family, const Matrix& h) {
  const int L = qubit_count_for_dim(h.rows(), "optimize_gd");
  GeneratorSpec spec = family;
  auto ramp = [L] {
    RealVector a(L);
    for (int j = 1; j <= L; ++j) a[j - 1] = static_cast<double>(j);
    return a;
  };
  switch (spec.kind) {
    case GeneratorKind::MagneticField:
      if (spec.alpha.size() == 0) spec.alpha = ramp();
      break;
    case GeneratorKind::NNIsing: {
      if (spec.alpha.size() == 0) spec.alpha = ramp();
      const int bonds = spec.boundary == Boundary::Open ? L - 1 : L;
      if (spec.beta.size() == 0) spec.beta = RealVector::Ones(bonds);
      break;
    }
    case GeneratorKind::AllToAllIsing:
      if (spec.alpha.size() == 0) spec.alpha = ramp();
      if (spec.beta_pairs.size() == 0) spec.beta_pairs = RealMatrix::Ones(L, L);
      break;
    case GeneratorKind::FullDiagonal:
      if (spec.diagonal.size() == 0) spec.diagonal = h.diagonal().real();
      break;
    default:
      break;
  }
  return spec;
}

RealVector pack_parameters(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::MagneticField:
      return spec.alpha;
    case GeneratorKind::NNIsing: {
      RealVector theta(spec.alpha.size() + spec.beta.size());
      theta << spec.alpha, spec.beta;
      return theta;
    }
    case GeneratorKind::AllToAllIsing: {
      const auto L = spec.alpha.size();
      RealVector theta(L + L * (L - 1) / 2);
      Eigen::Index pos = 0;
      for (Eigen::Index j = 0; j < L; ++j) theta[pos++] = spec.alpha[j];
      for (Eigen::Index j = 0; j < L; ++j)
        for (Eigen::Index k = j + 1; k < L; ++k) theta[pos++] = spec.beta_pairs(j, k);
      return theta;
    }
    case GeneratorKind::FullDiagonal:
      return spec.diagonal;
    default:
      throw std::invalid_argument("optimize_gd: family has no trainable parameters");
  }
}

GeneratorSpec unpack_parameters(const GeneratorSpec& shape, const RealVector& theta) {
  GeneratorSpec spec = shape;
  switch (shape.kind) {
    case GeneratorKind::MagneticField:
      spec.alpha = theta;
      break;
    case GeneratorKind::NNIsing:
      spec.alpha = theta.head(shape.alpha.size());
      spec.beta = theta.tail(shape.beta.size());
      break;
    case GeneratorKind::AllToAllIsing: {
      const auto L = shape.alpha.size();
      spec.alpha = theta.head(L);
      Eigen::Index pos = L;
      spec.beta_pairs = RealMatrix::Zero(L, L);
      for (Eigen::Index j = 0; j < L; ++j)
        for (Eigen::Index k = j + 1; k < L; ++k) spec.beta_pairs(j, k) = theta[pos++];
      break;
    }
    case GeneratorKind::FullDiagonal:
      spec.diagonal = theta;
      break;
    default:
      break;
  }
  return spec;
}

}  // namespace

OptimizedGenerator optimize_gd(const Matrix& h, const GeneratorSpec& family,
                               const CostFunction& cost, const ScheduleConfig& sched,
                               const GdConfig& gd) {
  require_hermitian(h, "optimize_gd");
  if (!is_trainable(family.kind))
    throw std::invalid_argument("optimize_gd: family has no trainable parameters");
  if (gd.max_iters < 0 || gd.fd_step <= 0 || gd.initial_rate <= 0 ||
      gd.backtrack_shrink <= 0 || gd.backtrack_shrink >= 1 || gd.armijo_c <= 0 || gd.tol < 0)
    throw std::invalid_argument("optimize_gd: bad gradient-descent configuration");

  const GeneratorSpec shape = defaulted_family(family, h);
  const double target_norm = std::sqrt(static_cast<double>(h.rows()));
  const double tiny = std::numeric_limits<double>::min();

  auto project = [&](RealVector& theta) {
    if (!gd.project_unit_norm) return;
    const double norm = hs_norm(realize(unpack_parameters(shape, theta), h));
    if (norm > tiny) theta *= target_norm / norm;
  };

  auto objective = [&](const RealVector& theta) {
    return schedule(h, realize(unpack_parameters(shape, theta), h), cost, sched);
  };

  RealVector theta = pack_parameters(shape);
  project(theta);
  ScheduleResult current = objective(theta);

  for (int iter = 0; iter < gd.max_iters; ++iter) {
    RealVector grad(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      RealVector probe = theta;
      probe[i] = theta[i] + gd.fd_step;
      const double up = objective(probe).cost;
      probe[i] = theta[i] - gd.fd_step;
      const double down = objective(probe).cost;
      grad[i] = (up - down) / (2.0 * gd.fd_step);
    }
    const double grad_sq = grad.squaredNorm();
    if (grad_sq == 0.0) break;

    double rate = gd.initial_rate;
    bool accepted = false;
    RealVector next;
    ScheduleResult next_result;
    for (int shrink = 0; shrink < 60; ++shrink) {
      next = theta - rate * grad;
      project(next);
      next_result = objective(next);
      if (!std::isfinite(next_result.cost)) return {unpack_parameters(shape, theta),
                                                    current.s, current.cost, current.no_gain};
      if (next_result.cost <= current.cost - gd.armijo_c * rate * grad_sq) {
        accepted = true;
        break;
      }
      rate *= gd.backtrack_shrink;
    }
    if (!accepted) break;

    const double gain = current.cost - next_result.cost;
    theta = next;
    current = next_result;
    if (gain < gd.tol * std::max(std::abs(current.cost), 1e-30)) break;
  }

  return {unpack_parameters(shape, theta), current.s, current.cost, current.no_gain};
}

OptimizedGenerator hamming_search(const Matrix& h, const CostFunction& cost,
                                  const ScheduleConfig& sched) {
  require_hermitian(h, "hamming_search");
  const Eigen::Index dim = h.rows();
  int L = 0;
  while ((Eigen::Index(1) << L) < dim) ++L;
  if ((Eigen::Index(1) << L) != dim)
    throw std::invalid_argument("hamming_search: dimension must be a power of two");
  if (L > 14) throw std::invalid_argument("hamming_search: too many qubits for exhaustive search");

  const double cost0 = evaluate(cost, h);
  OptimizedGenerator best;
  best.cost = std::numeric_limits<double>::infinity();
  for (std::uint64_t m = 1; m < (std::uint64_t(1) << L); ++m) {
    std::string mu(static_cast<std::size_t>(L), '0');
    for (int j = 1; j <= L; ++j)
      if ((m >> (L - j)) & 1) mu[static_cast<std::size_t>(j - 1)] = '1';
    const GeneratorSpec spec = pauli_z_product(mu);
    const ScheduleResult r = schedule(h, realize(spec, h), cost, sched);
    if (r.cost < best.cost) best = {spec, r.s, r.cost, false};
  }
  best.no_gain = !(best.cost < cost0);
  return best;
}

GeneratorSpec normalize_spec(const GeneratorSpec& spec, double z, double r) {
  if (r == 0.0) throw std::invalid_argument("normalize_spec: scale must be nonzero");
  GeneratorSpec out = spec;
  switch (spec.kind) {
    case GeneratorKind::MagneticField:
      out.alpha *= r;  // the shift z lies outside the family's span and drops out
      return out;
    case GeneratorKind::NNIsing:
      out.alpha *= r;
      out.beta *= r;
      return out;
    case GeneratorKind::AllToAllIsing:
      out.alpha *= r;
      out.beta_pairs *= r;
      return out;
    case GeneratorKind::FullDiagonal:
      if (out.diagonal.size() == 0)
        throw std::invalid_argument("normalize_spec: diagonal entries are not set");
      out.diagonal = (r * out.diagonal).array() + z;
      return out;
    default:
      if (r == 1.0 && z == 0.0) return out;
      throw std::invalid_argument("normalize_spec: family has no free parameters");
  }
}

}  // namespace dbi
