#include "dbi/iteration.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dbi {

GeneratorPolicy GeneratorPolicy::fixed(GeneratorSpec spec) {
  return {PolicyKind::FixedDiagonal, std::move(spec), {}};
}

GeneratorPolicy GeneratorPolicy::canonical() {
  return {PolicyKind::Canonical, spectral_generator(GeneratorKind::Dephasing), {}};
}

GeneratorPolicy GeneratorPolicy::adaptive_gradient(GeneratorSpec family, GdConfig gd) {
  return {PolicyKind::AdaptiveGradient, std::move(family), gd};
}

GeneratorPolicy GeneratorPolicy::adaptive_hamming() {
  return {PolicyKind::AdaptiveHamming, {}, {}};
}

const char* run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::MarginalGain: return "marginal-gain";
    case RunStatus::NoAdmissibleStep: return "no-admissible-step";
  }
  return "?";
}

double DbiState::total_duration() const {
  double total = 0.0;
  for (const auto& step : steps) total += step.s;
  return total;
}

DbiState dbi_run(const Matrix& h0, const GeneratorPolicy& policy,
                 const ScheduleConfig& sched, const CostFunction& cost, int n_steps,
                 double min_relative_gain) {
  require_hermitian(h0, "dbi_run");
  if (n_steps < 0) throw std::invalid_argument("dbi_run: n_steps must be nonnegative");

  DbiState state;
  state.h0 = h0;
  state.h_current = h0;
  state.mode = policy.kind;

  // A fixed generator is realized once, against the input Hamiltonian.
  Matrix fixed_d;
  if (policy.kind == PolicyKind::FixedDiagonal) fixed_d = realize(policy.spec, h0);
  // Adaptive gradient descent warm-starts each step from the previous optimum;
  // an explicit-diagonal family instead re-seeds from the current Hamiltonian.
  GeneratorSpec family = policy.spec;

  for (int k = 0; k < n_steps; ++k) {
    const Matrix& h = state.h_current;
    const double cost_before = evaluate(cost, h);

    GeneratorSpec spec;
    Matrix d;
    ScheduleResult found;
    switch (policy.kind) {
      case PolicyKind::FixedDiagonal: {
        spec = policy.spec;
        d = fixed_d;
        found = schedule(h, d, cost, sched);
        break;
      }
      case PolicyKind::Canonical: {
        spec = spectral_generator(GeneratorKind::Dephasing);
        d = delta_restrict(h);
        found = schedule(h, d, cost, sched);
        break;
      }
      case PolicyKind::AdaptiveGradient: {
        if (family.kind == GeneratorKind::FullDiagonal) family.diagonal.resize(0);
        const OptimizedGenerator best = optimize_gd(h, family, cost, sched, policy.gd);
        spec = best.spec;
        family = best.spec;
        d = realize(spec, h);
        found = {best.s, best.cost, best.no_gain};
        break;
      }
      case PolicyKind::AdaptiveHamming: {
        const OptimizedGenerator best = hamming_search(h, cost, sched);
        spec = best.spec;
        d = realize(spec, h);
        found = {best.s, best.cost, best.no_gain};
        break;
      }
    }

    if (found.no_gain) {
      state.status = RunStatus::NoAdmissibleStep;
      return state;
    }
    const double gain = cost_before - found.cost;
    if (min_relative_gain > 0.0 &&
        gain < min_relative_gain * std::max(std::abs(cost_before), 1e-30)) {
      state.status = RunStatus::MarginalGain;
      return state;
    }

    state.h_current = dbr_step(h, d, found.s);
    StepRecord record;
    record.generator = spec;
    record.d_realized = d;
    record.s = found.s;
    record.cost_before = cost_before;
    record.cost_after = evaluate(cost, state.h_current);
    record.f1_after = f1_off_diagonal_norm(state.h_current);
    state.steps.push_back(std::move(record));
  }
  state.status = RunStatus::Completed;
  return state;
}

Matrix replay(const DbiState& state) {
  Matrix h = state.h0;
  for (const auto& step : state.steps) h = dbr_step(h, step.d_realized, step.s);
  return h;
}

std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(const DbiState& state, std::ostream& os) {
  os << "step,s,cost_before,cost_after,f1,generator_tag\n";
  int k = 1;
  for (const auto& step : state.steps) {
    os << k++ << ',' << format_float(step.s) << ',' << format_float(step.cost_before)
       << ',' << format_float(step.cost_after) << ',' << format_float(step.f1_after)
       << ',' << generator_tag(step.generator) << '\n';
  }
}

}  // namespace dbi
