#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbi/costs.hpp"
#include "dbi/generators.hpp"
#include "dbi/iteration.hpp"
#include "dbi/linalg.hpp"
#include "dbi/scheduling.hpp"

namespace dbi {

// Raised for malformed experiment configs; the CLI maps it to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ModelConfig {
  std::string name = "tfim";  // "tfim" | "xxz"
  int n_qubits = 5;
  double coupling = 3.0;  // transverse field (tfim) or anisotropy (xxz)
  bool allow_large = false;
};

// Dense model Hamiltonian. Memory grows as 16^L bytes per matrix, hence the
// n_qubits <= 12 guard unless allow_large is set.
Matrix build_model(const ModelConfig& model);

struct ExperimentConfig {
  std::string experiment;  // one of the six experiment names below
  ModelConfig model;
  ScheduleConfig schedule;
  CostKind cost_kind = CostKind::OffDiagonalNorm;
  std::optional<Eigen::Index> reference_state_index;  // f3/f4 basis state
  bool reference_state_random = false;                // f3/f4 random state
  std::optional<GeneratorSpec> reference_d;           // f2 target diagonal
  std::vector<GeneratorSpec> generators;              // realized against the model
  std::vector<std::string> generator_labels;          // parallel to generators
  std::vector<std::string> families;    // adaptive-compare ansatz families
  std::string policy = "canonical";     // dbi-run generator policy
  GdConfig gd;
  int n_steps = 30;
  double min_relative_gain = 1e-3;
  std::uint64_t rng_seed = 7;
  std::vector<int> poly_orders = {2, 3, 5, 8};  // taylor-validity
  double scan_max = 0.0;                        // 0 -> schedule.s_max
  int scan_points = 0;                          // 0 -> schedule.n_points
  double fit_s_lo = 1e-4, fit_s_hi = 1e-1;      // gc-compare slope window
  std::filesystem::path output_dir = "out";
  nlohmann::ordered_json raw;  // the parsed document, echoed into the report
};

// Parses and validates a config document; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::ordered_json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunReport {
  nlohmann::ordered_json document;   // persisted as report.json
  std::filesystem::path directory;   // where all outputs landed
  std::vector<std::string> csv_files;
  std::string plot_script;           // file name of the emitted script
  double wall_seconds = 0.0;         // in-memory only, never serialized
};

// Executes the named experiment: writes CSVs, report.json, and a plot script
// into the output directory (env DBI_OUTPUT_DIR overrides the config value).
RunReport run_experiment(const ExperimentConfig& config);

// Renders the report's plot block as a standalone gnuplot script referencing
// the CSVs by relative path. No computation happens inside the script.
std::filesystem::path emit_plot_script(const RunReport& report);

// Named diagonal-generator presets understood by configs and `dbi presets`.
struct PresetInfo {
  std::string name;
  std::string description;
};
const std::vector<PresetInfo>& generator_presets();
GeneratorSpec make_preset(const std::string& name, int n_qubits, std::uint64_t seed);

// Parameter-free ansatz family for gradient/Hamming adaptive runs.
GeneratorSpec make_family(const std::string& name);

}  // namespace dbi
