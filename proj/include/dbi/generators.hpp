#pragma once

#include <cstdint>
#include <string>

#include "dbi/costs.hpp"
#include "dbi/scheduling.hpp"

namespace dbi {

// Diagonal-generator families. The first six are built from a context
// Hamiltonian's spectral data; the rest carry explicit parameters.
enum class GeneratorKind {
  MinMax,          // equidistant values spanning the context diagonal's range
  MaxMin,          // the same values in reversed basis order
  ShuffledMinMax,  // seeded permutation of the MinMax values
  SampledMinMax,   // seeded draws (with replacement) from the MinMax values, sorted
  EigenSorted,     // context eigenvalues, ascending
  Dephasing,       // diagonal restriction of the context
  MagneticField,   // sum_j alpha_j Z_j
  NNIsing,         // sum_j alpha_j Z_j + sum_bonds beta_b Z_j Z_{j+1}
  AllToAllIsing,   // sum_j alpha_j Z_j + sum_{j<j'} beta_{jj'} Z_j Z_{j'}
  PauliZProduct,   // prod_{j : mu_j = 1} Z_j
  FullDiagonal,    // explicit diagonal entries
};

enum class Boundary { Open, Periodic };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Dephasing;
  std::uint64_t seed = 0;  // ShuffledMinMax / SampledMinMax draws
  RealVector alpha;        // single-site field weights, length L
  RealVector beta;         // bond weights: length L-1 (open) or L (periodic)
  RealMatrix beta_pairs;   // L x L pair weights; only the upper triangle is read
  std::string mu;          // '0'/'1' membership string, qubit 1 first
  RealVector diagonal;     // explicit diagonal, length 2^L
  Boundary boundary = Boundary::Open;
};

GeneratorSpec spectral_generator(GeneratorKind kind, std::uint64_t seed = 0);
GeneratorSpec magnetic_field(RealVector alpha);
GeneratorSpec nn_ising(RealVector alpha, RealVector beta, Boundary boundary);
GeneratorSpec all_to_all_ising(RealVector alpha, RealMatrix beta_pairs);
GeneratorSpec pauli_z_product(std::string mu);
GeneratorSpec full_diagonal(RealVector diagonal);

const char* kind_name(GeneratorKind kind);  // "minmax", "magnetic-field", ...
// Short CSV tag: the kind name, plus the membership bits for PauliZProduct.
std::string generator_tag(const GeneratorSpec& spec);

// Build the diagonal operator. The context Hamiltonian is required for the
// spectral kinds and for FullDiagonal with no explicit entries (which then
// takes the context's diagonal); it is ignored otherwise.
Matrix realize(const GeneratorSpec& spec, const Matrix& h_context = Matrix());

// The +1/-1 eigenvalue pattern of Z on qubit j (1-based, qubit 1 = most
// significant bit) over the 2^L basis states.
RealVector pauli_z_diagonal(int n_qubits, int qubit);

struct GdConfig {
  int max_iters = 100;
  double fd_step = 1e-5;        // central finite-difference probe step
  double initial_rate = 0.1;    // backtracking line search start
  double backtrack_shrink = 0.5;
  double armijo_c = 1e-4;
  double tol = 1e-6;            // stop below this relative improvement
  bool project_unit_norm = false;  // renormalize so hs_norm(realize) = 2^{L/2}
};

struct OptimizedGenerator {
  GeneratorSpec spec;
  double s = 0.0;
  double cost = 0.0;
  bool no_gain = false;
};

// Per-step generator optimization: gradient descent on the family parameters
// where the objective of theta is the scheduled post-rotation cost. Empty
// parameter arrays are defaulted: alpha_j = j, beta = 1, FullDiagonal from the
// current Hamiltonian's diagonal.
OptimizedGenerator optimize_gd(const Matrix& h, const GeneratorSpec& family,
                               const CostFunction& cost, const ScheduleConfig& sched,
                               const GdConfig& gd = {});

// Exhaustive PauliZProduct search over all nonzero membership strings, each
// with its own scheduled duration; ties break toward the smallest string read
// as a binary integer (qubit 1 = most significant bit).
OptimizedGenerator hamming_search(const Matrix& h, const CostFunction& cost,
                                  const ScheduleConfig& sched);

// Rescale parameters by r and absorb a constant shift z. Families whose span
// excludes the identity drop z; only FullDiagonal keeps it.
GeneratorSpec normalize_spec(const GeneratorSpec& spec, double z, double r);

}  // namespace dbi
