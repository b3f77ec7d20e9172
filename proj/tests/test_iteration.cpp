#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dbi/hamiltonians.hpp"
#include "dbi/iteration.hpp"

using namespace dbi;

namespace {

ScheduleConfig small_grid(double s_max = 0.5, int n_points = 40) {
  ScheduleConfig cfg;
  cfg.s_max = s_max;
  cfg.n_points = n_points;
  return cfg;
}

}  // namespace

TEST_CASE("a zero-step budget completes immediately") {
  const auto state = dbi_run(tfim(3, 2.0), GeneratorPolicy::canonical(), small_grid(),
                             cost_f1(), 0);
  CHECK(state.status == RunStatus::Completed);
  CHECK(state.steps.empty());
  CHECK(hs_norm(state.h_current - state.h0) == 0.0);
  CHECK(state.total_duration() == 0.0);
}

TEST_CASE("an already-diagonal input admits no step") {
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << 4, -1, 2, 0;
  const auto state = dbi_run(h, GeneratorPolicy::canonical(), small_grid(), cost_f1(), 10);
  CHECK(state.status == RunStatus::NoAdmissibleStep);
  CHECK(state.steps.empty());
}

TEST_CASE("negative budgets are rejected") {
  CHECK_THROWS_AS(dbi_run(tfim(2, 1.0), GeneratorPolicy::canonical(), small_grid(),
                          cost_f1(), -1),
                  std::invalid_argument);
}

TEST_CASE("the restriction policy walks the cost down and replays exactly") {
  const Matrix h0 = tfim(4, 2.0);
  const auto state = dbi_run(h0, GeneratorPolicy::canonical(), small_grid(), cost_f1(), 5,
                             0.0);
  CHECK(state.status == RunStatus::Completed);
  REQUIRE(state.steps.size() == 5);

  // each step's generator is the running diagonal and the costs chain up
  CHECK(hs_norm(state.steps[0].d_realized - delta_restrict(h0)) < 1e-14);
  double prev = f1_off_diagonal_norm(h0);
  for (std::size_t k = 0; k < state.steps.size(); ++k) {
    const auto& step = state.steps[k];
    CHECK(step.cost_before == doctest::Approx(prev).epsilon(1e-12));
    CHECK(step.cost_after < step.cost_before);
    CHECK(step.s > 0.0);
    prev = step.cost_after;
  }

  CHECK(hs_norm(replay(state) - state.h_current) < 1e-12);
  CHECK(hs_norm(state.h_current) ==
        doctest::Approx(hs_norm(h0)).epsilon(1e-7));  // isospectral flow
  CHECK(state.total_duration() > 0.0);
}

TEST_CASE("a fixed generator is realized once and reused verbatim") {
  const Matrix h0 = xxz(3, 0.5);
  const auto policy =
      GeneratorPolicy::fixed(spectral_generator(GeneratorKind::ShuffledMinMax, 7));
  const auto state = dbi_run(h0, policy, small_grid(), cost_f1(), 4, 0.0);
  REQUIRE(state.steps.size() >= 2);
  const Matrix& first = state.steps.front().d_realized;
  CHECK(hs_norm(first - realize(policy.spec, h0)) == 0.0);
  for (const auto& step : state.steps)
    CHECK(hs_norm(step.d_realized - first) == 0.0);
}

TEST_CASE("a marginal first step stops the run before it is applied") {
  const auto state = dbi_run(tfim(4, 2.0), GeneratorPolicy::canonical(), small_grid(),
                             cost_f1(), 10, 0.99);
  CHECK(state.status == RunStatus::MarginalGain);
  CHECK(state.steps.empty());
  CHECK(hs_norm(state.h_current - state.h0) == 0.0);
}

TEST_CASE("a nonpositive threshold disables the marginal-gain stop") {
  const auto strict = dbi_run(tfim(3, 2.0), GeneratorPolicy::canonical(), small_grid(),
                              cost_f1(), 8, 0.2);
  const auto free_run = dbi_run(tfim(3, 2.0), GeneratorPolicy::canonical(), small_grid(),
                                cost_f1(), 8, 0.0);
  CHECK(strict.steps.size() < free_run.steps.size());
  CHECK(free_run.status == RunStatus::Completed);
}

TEST_CASE("adaptive gradient policy trains a family each step") {
  GdConfig gd;
  gd.max_iters = 3;
  const auto policy = GeneratorPolicy::adaptive_gradient(magnetic_field({}), gd);
  const auto state = dbi_run(tfim(3, 2.0), policy, small_grid(0.5, 30), cost_f1(), 2, 0.0);
  REQUIRE(state.steps.size() == 2);
  for (const auto& step : state.steps) {
    CHECK(generator_tag(step.generator) == "magnetic-field");
    CHECK(step.cost_after < step.cost_before);
  }
}

TEST_CASE("adaptive membership policy picks a product string each step") {
  const auto state = dbi_run(xxz(3, 0.5), GeneratorPolicy::adaptive_hamming(),
                             small_grid(1.0, 60), cost_f1(), 2, 0.0);
  REQUIRE(state.steps.size() == 2);
  for (const auto& step : state.steps) {
    CHECK(generator_tag(step.generator).rfind("pauli-z:", 0) == 0);
    CHECK(step.cost_after < step.cost_before);
  }
}

TEST_CASE("replay of an untouched state returns the input") {
  DbiState state;
  state.h0 = tfim(2, 3.0);
  state.h_current = state.h0;
  CHECK(hs_norm(replay(state) - state.h0) == 0.0);
}

TEST_CASE("trajectory CSV layout") {
  const auto state = dbi_run(tfim(3, 2.0), GeneratorPolicy::canonical(), small_grid(),
                             cost_f1(), 2, 0.0);
  REQUIRE(state.steps.size() == 2);
  std::ostringstream os;
  write_trajectory_csv(state, os);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "step,s,cost_before,cost_after,f1,generator_tag");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string field;
    REQUIRE(std::getline(fields, field, ','));
    CHECK(field == std::to_string(rows));
    REQUIRE(std::getline(fields, field, ','));
    CHECK(std::stod(field) == state.steps[static_cast<std::size_t>(rows - 1)].s);
    REQUIRE(std::getline(fields, field, ','));
    REQUIRE(std::getline(fields, field, ','));
    REQUIRE(std::getline(fields, field, ','));
    CHECK(std::stod(field) ==
          state.steps[static_cast<std::size_t>(rows - 1)].f1_after);
    REQUIRE(std::getline(fields, field));
    CHECK(field == "dephasing");
  }
  CHECK(rows == 2);
}

TEST_CASE("float formatting round-trips") {
  for (const double x : {0.0, 1.0 / 3.0, 0.1, -2.5e300, 1e-17, 12.625}) {
    CHECK(std::stod(format_float(x)) == x);
  }
  CHECK(format_float(0.5) == "0.5");
}

TEST_CASE("status names") {
  CHECK(std::string(run_status_name(RunStatus::Completed)) == "completed");
  CHECK(std::string(run_status_name(RunStatus::MarginalGain)) == "marginal-gain");
  CHECK(std::string(run_status_name(RunStatus::NoAdmissibleStep)) == "no-admissible-step");
}
