#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dbi/generators.hpp"

namespace dbi {

// How each step's diagonal generator is chosen.
enum class PolicyKind {
  FixedDiagonal,     // one diagonal realized from the input Hamiltonian, reused
  Canonical,         // diagonal restriction of the current Hamiltonian each step
  AdaptiveGradient,  // per-step gradient descent over a parametric family
  AdaptiveHamming,   // per-step exhaustive Pauli-Z product search
};

struct GeneratorPolicy {
  PolicyKind kind = PolicyKind::Canonical;
  GeneratorSpec spec;  // FixedDiagonal: what to realize; AdaptiveGradient: the family
  GdConfig gd;         // AdaptiveGradient settings

  static GeneratorPolicy fixed(GeneratorSpec spec);
  static GeneratorPolicy canonical();
  static GeneratorPolicy adaptive_gradient(GeneratorSpec family, GdConfig gd = {});
  static GeneratorPolicy adaptive_hamming();
};

enum class RunStatus {
  Completed,        // the full step budget was applied
  MarginalGain,     // stopped before a step whose relative gain fell under threshold
  NoAdmissibleStep, // the scheduler found no cost-reducing duration
};

const char* run_status_name(RunStatus status);

struct StepRecord {
  GeneratorSpec generator;
  Matrix d_realized;  // stored so runs replay bit-identically
  double s = 0.0;
  double cost_before = 0.0;
  double cost_after = 0.0;
  double f1_after = 0.0;
};

struct DbiState {
  Matrix h0;
  Matrix h_current;
  std::vector<StepRecord> steps;
  PolicyKind mode = PolicyKind::Canonical;
  RunStatus status = RunStatus::Completed;

  double total_duration() const;
};

// Run up to n_steps rotations, each generator chosen by the policy and each
// duration by the scheduler. A candidate step whose relative cost gain falls
// below min_relative_gain stops the run before being applied (a nonpositive
// threshold disables that check).
DbiState dbi_run(const Matrix& h0, const GeneratorPolicy& policy,
                 const ScheduleConfig& sched, const CostFunction& cost, int n_steps,
                 double min_relative_gain = 1e-3);

// Reapply the logged rotations to h0.
Matrix replay(const DbiState& state);

// Columns: step, s, cost_before, cost_after, f1, generator_tag.
void write_trajectory_csv(const DbiState& state, std::ostream& os);

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_float(double x);

}  // namespace dbi
