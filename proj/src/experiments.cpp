#include "dbi/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>

#include "dbi/dbr.hpp"
#include "dbi/hamiltonians.hpp"
#include "dbi/product_formulas.hpp"
#include "dbi/rng.hpp"

namespace dbi {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const ordered_json* find(const ordered_json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void require_object(const ordered_json& node, const std::string& where) {
  if (!node.is_object()) fail(where + ": expected an object");
}

void check_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    const auto& key = item.key();
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      fail(where + ": unknown key \"" + key + "\"");
  }
}

double as_double(const ordered_json& node, const std::string& where) {
  if (!node.is_number()) fail(where + ": expected a number");
  return node.get<double>();
}

int as_int(const ordered_json& node, const std::string& where) {
  if (!node.is_number_integer()) fail(where + ": expected an integer");
  return node.get<int>();
}

std::uint64_t as_seed(const ordered_json& node, const std::string& where) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (!node.is_number_integer() || node.get<std::int64_t>() < 0)
    fail(where + ": expected a nonnegative integer");
  return static_cast<std::uint64_t>(node.get<std::int64_t>());
}

bool as_bool(const ordered_json& node, const std::string& where) {
  if (!node.is_boolean()) fail(where + ": expected a boolean");
  return node.get<bool>();
}

std::string as_string(const ordered_json& node, const std::string& where) {
  if (!node.is_string()) fail(where + ": expected a string");
  return node.get<std::string>();
}

RealVector as_real_vector(const ordered_json& node, const std::string& where) {
  if (!node.is_array()) fail(where + ": expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(node.size()));
  Eigen::Index i = 0;
  for (const auto& x : node) v[i++] = as_double(x, where);
  return v;
}

// L x L rows, or the flat upper triangle (row-major over j < j').
RealMatrix as_pair_matrix(const ordered_json& node, int n_qubits, const std::string& where) {
  if (!node.is_array()) fail(where + ": expected an array");
  const auto L = static_cast<Eigen::Index>(n_qubits);
  RealMatrix m = RealMatrix::Zero(L, L);
  if (!node.empty() && node.front().is_array()) {
    if (static_cast<Eigen::Index>(node.size()) != L)
      fail(where + ": expected " + std::to_string(n_qubits) + " rows");
    Eigen::Index r = 0;
    for (const auto& row : node) {
      const RealVector v = as_real_vector(row, where);
      if (v.size() != L) fail(where + ": rows must have length " + std::to_string(n_qubits));
      m.row(r++) = v.transpose();
    }
  } else {
    const RealVector v = as_real_vector(node, where);
    if (v.size() != L * (L - 1) / 2)
      fail(where + ": flat form must list the " + std::to_string(L * (L - 1) / 2) +
           " upper-triangle weights");
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < L; ++j)
      for (Eigen::Index jj = j + 1; jj < L; ++jj) m(j, jj) = v[k++];
  }
  return m;
}

GeneratorKind kind_from_name(const std::string& name, const std::string& where) {
  static const std::pair<const char*, GeneratorKind> table[] = {
      {"minmax", GeneratorKind::MinMax},
      {"maxmin", GeneratorKind::MaxMin},
      {"shuffled", GeneratorKind::ShuffledMinMax},
      {"sampled", GeneratorKind::SampledMinMax},
      {"eigen", GeneratorKind::EigenSorted},
      {"dephasing", GeneratorKind::Dephasing},
      {"magnetic-field", GeneratorKind::MagneticField},
      {"nn-ising", GeneratorKind::NNIsing},
      {"a2a-ising", GeneratorKind::AllToAllIsing},
      {"pauli-z", GeneratorKind::PauliZProduct},
      {"full-diagonal", GeneratorKind::FullDiagonal},
  };
  for (const auto& [slug, kind] : table)
    if (name == slug) return kind;
  fail(where + ": unknown generator kind \"" + name + "\"");
}

// A generator node is either a preset name or an explicit spec object.
std::pair<GeneratorSpec, std::string> parse_generator(const ordered_json& node,
                                                      int n_qubits,
                                                      std::uint64_t default_seed,
                                                      const std::string& where) {
  if (node.is_string()) {
    const std::string name = node.get<std::string>();
    return {make_preset(name, n_qubits, default_seed), name};
  }
  require_object(node, where);
  check_keys(node, {"kind", "seed", "alpha", "beta", "beta_pairs", "mu", "diagonal", "boundary"},
             where);
  const auto* kind_node = find(node, "kind");
  if (!kind_node) fail(where + ": missing \"kind\"");
  GeneratorSpec spec;
  spec.kind = kind_from_name(as_string(*kind_node, where + ".kind"), where + ".kind");
  spec.seed = default_seed;
  if (const auto* seed = find(node, "seed")) spec.seed = as_seed(*seed, where + ".seed");
  if (const auto* alpha = find(node, "alpha"))
    spec.alpha = as_real_vector(*alpha, where + ".alpha");
  if (const auto* beta = find(node, "beta")) spec.beta = as_real_vector(*beta, where + ".beta");
  if (const auto* pairs = find(node, "beta_pairs"))
    spec.beta_pairs = as_pair_matrix(*pairs, n_qubits, where + ".beta_pairs");
  if (const auto* mu = find(node, "mu")) spec.mu = as_string(*mu, where + ".mu");
  if (const auto* diag = find(node, "diagonal"))
    spec.diagonal = as_real_vector(*diag, where + ".diagonal");
  if (const auto* boundary = find(node, "boundary")) {
    const std::string b = as_string(*boundary, where + ".boundary");
    if (b == "open")
      spec.boundary = Boundary::Open;
    else if (b == "periodic")
      spec.boundary = Boundary::Periodic;
    else
      fail(where + ".boundary: expected \"open\" or \"periodic\"");
  }
  return {spec, kind_name(spec.kind)};
}

CostKind cost_from_name(const std::string& name, const std::string& where) {
  if (name == "f1") return CostKind::OffDiagonalNorm;
  if (name == "f2") return CostKind::LeastSquares;
  if (name == "f3") return CostKind::Energy;
  if (name == "f4") return CostKind::EnergyFluctuation;
  fail(where + ": expected one of \"f1\", \"f2\", \"f3\", \"f4\"");
}

CostFunction build_cost(const ExperimentConfig& config, const Matrix& h0) {
  switch (config.cost_kind) {
    case CostKind::OffDiagonalNorm:
      return cost_f1();
    case CostKind::LeastSquares: {
      const Matrix d =
          config.reference_d ? realize(*config.reference_d, h0) : delta_restrict(h0);
      return cost_f2(d);
    }
    case CostKind::Energy:
    case CostKind::EnergyFluctuation: {
      Vector psi;
      if (config.reference_state_random) {
        std::mt19937_64 rng(config.rng_seed);
        psi.resize(h0.rows());
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
          const double re = 2.0 * uniform_unit(rng) - 1.0;
          const double im = 2.0 * uniform_unit(rng) - 1.0;
          psi[i] = Complex(re, im);
        }
        psi.normalize();
      } else {
        const Eigen::Index index = config.reference_state_index.value_or(0);
        if (index < 0 || index >= h0.rows())
          fail("reference_state: index " + std::to_string(index) + " out of range for dim " +
               std::to_string(h0.rows()));
        psi = basis_state(h0.rows(), index);
      }
      return config.cost_kind == CostKind::Energy ? cost_f3(psi) : cost_f4(psi);
    }
  }
  fail("cost: unknown kind");
}

std::ofstream open_text(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);  // binary keeps CSV bytes platform-stable
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

ordered_json plot_series(const std::string& csv, int x, int y, const std::string& title,
                         const std::string& style) {
  ordered_json s;
  s["csv"] = csv;
  s["x"] = x;
  s["y"] = y;
  s["title"] = title;
  s["style"] = style;
  return s;
}

ordered_json& plot_block(ordered_json& doc, const std::string& png, const std::string& xlabel,
                         const std::string& ylabel, const std::string& title) {
  ordered_json plot;
  plot["script"] = "plot.gp";
  plot["output"] = png;
  plot["xlabel"] = xlabel;
  plot["ylabel"] = ylabel;
  plot["title"] = title;
  plot["series"] = ordered_json::array();
  doc["plot"] = std::move(plot);
  return doc["plot"];
}

struct RunSummary {
  std::string name;
  DbiState state;
  double initial_cost = 0.0, final_cost = 0.0;
  double initial_f1 = 0.0, final_f1 = 0.0;
};

RunSummary summarize(std::string name, DbiState state, const CostFunction& cost) {
  RunSummary out{std::move(name), std::move(state), 0, 0, 0, 0};
  out.initial_cost = evaluate(cost, out.state.h0);
  out.initial_f1 = f1_off_diagonal_norm(out.state.h0);
  out.final_cost =
      out.state.steps.empty() ? out.initial_cost : out.state.steps.back().cost_after;
  out.final_f1 = out.state.steps.empty() ? out.initial_f1 : out.state.steps.back().f1_after;
  return out;
}

ordered_json summary_json(const RunSummary& run) {
  ordered_json j;
  j["name"] = run.name;
  j["status"] = run_status_name(run.state.status);
  j["steps"] = run.state.steps.size();
  j["initial_cost"] = run.initial_cost;
  j["final_cost"] = run.final_cost;
  j["initial_f1"] = run.initial_f1;
  j["final_f1"] = run.final_f1;
  j["total_s"] = run.state.total_duration();
  return j;
}

void write_run_csv(const RunReport& report, std::vector<std::string>& csv_files,
                   const std::string& name, const DbiState& state) {
  auto os = open_text(report.directory / name);
  write_trajectory_csv(state, os);
  csv_files.push_back(name);
}

// In fixed-generator comparisons the dephasing entry means the canonical flow
// (re-dephased every step); everything else is frozen at the first realization.
GeneratorPolicy comparison_policy(const GeneratorSpec& spec) {
  if (spec.kind == GeneratorKind::Dephasing) return GeneratorPolicy::canonical();
  return GeneratorPolicy::fixed(spec);
}

GeneratorPolicy family_policy(const std::string& name, const GdConfig& gd) {
  if (name == "pauli-z") return GeneratorPolicy::adaptive_hamming();
  return GeneratorPolicy::adaptive_gradient(make_family(name), gd);
}

void run_schedule_scan(const ExperimentConfig& config, const Matrix& h0,
                       const CostFunction& cost, RunReport& report) {
  const GeneratorSpec spec = config.generators.empty()
                                 ? spectral_generator(GeneratorKind::Dephasing)
                                 : config.generators.front();
  const std::string label =
      config.generators.empty() ? "dephasing" : config.generator_labels.front();
  const Matrix d = realize(spec, h0);

  const double s_max = config.scan_max > 0 ? config.scan_max : config.schedule.s_max;
  const int n = config.scan_points > 0 ? config.scan_points : config.schedule.n_points;

  const DbrCurve curve(h0, d);
  double best_s = 0.0, best_cost = std::numeric_limits<double>::infinity();
  {
    auto os = open_text(report.directory / "scan.csv");
    os << "s,cost\n";
    for (int i = 1; i <= n; ++i) {
      const double s = s_max * i / n;
      const double c = evaluate(cost, curve.at(s));
      os << format_float(s) << "," << format_float(c) << "\n";
      if (c < best_cost) {
        best_cost = c;
        best_s = s;
      }
    }
  }
  report.csv_files.push_back("scan.csv");

  const ScheduleResult chosen = schedule(h0, d, cost, config.schedule);

  ordered_json results;
  results["generator"] = label;
  results["cost"] = cost_name(config.cost_kind);
  results["initial_cost"] = evaluate(cost, h0);
  results["scan_min_s"] = best_s;
  results["scan_min_cost"] = best_cost;
  results["chosen_s"] = chosen.s;
  results["chosen_cost"] = chosen.cost;
  results["no_gain"] = chosen.no_gain;
  report.document["results"] = std::move(results);

  auto& plot = plot_block(report.document, "schedule_scan.png", "s",
                          cost_name(config.cost_kind), "cost along one rotation");
  plot["series"].push_back(plot_series("scan.csv", 1, 2, label, "lines"));
  plot["arrows"] = ordered_json::array({chosen.s});
}

void run_taylor_validity(const ExperimentConfig& config, const Matrix& h0,
                         const CostFunction& /*cost*/, RunReport& report) {
  // The series expansion targets the off-diagonal norm; this experiment
  // always compares against exact f1^2 regardless of the configured cost.
  const Matrix d =
      config.generators.empty() ? delta_restrict(h0) : realize(config.generators.front(), h0);
  const double s_max = config.scan_max > 0 ? config.scan_max : 0.04;
  const int n = config.scan_points > 0 ? config.scan_points : 400;

  std::vector<SigmaPolynomial> polys;
  polys.reserve(config.poly_orders.size());
  for (int order : config.poly_orders) polys.push_back(sigma_polynomial(h0, d, order));

  const DbrCurve curve(h0, d);
  const CostFunction f1_cost = cost_f1();
  std::vector<double> max_rel_error(polys.size(), 0.0);
  {
    auto os = open_text(report.directory / "taylor.csv");
    os << "s,f1_sq_exact";
    for (int order : config.poly_orders) os << ",poly_" << order;
    os << "\n";
    for (int i = 0; i <= n; ++i) {
      const double s = s_max * i / n;
      const double exact = std::pow(evaluate(f1_cost, curve.at(s)), 2);
      os << format_float(s) << "," << format_float(exact);
      for (std::size_t k = 0; k < polys.size(); ++k) {
        const double approx = polys[k](s);
        os << "," << format_float(approx);
        if (exact > 1e-30)
          max_rel_error[k] = std::max(max_rel_error[k], std::abs(approx - exact) / exact);
      }
      os << "\n";
    }
  }
  report.csv_files.push_back("taylor.csv");

  const auto exact_min = curve_first_local_min(h0, d, f1_cost, s_max, n);

  ordered_json results;
  if (exact_min) {
    results["exact_min_s"] = exact_min->s;
    results["exact_min_f1"] = exact_min->cost;
  } else {
    results["exact_min_s"] = nullptr;
  }
  results["orders"] = ordered_json::array();
  for (std::size_t k = 0; k < polys.size(); ++k) {
    ordered_json entry;
    entry["order"] = config.poly_orders[k];
    entry["max_rel_error"] = max_rel_error[k];
    const auto min_s = polynomial_first_local_min(polys[k], s_max);
    if (min_s) {
      entry["min_s"] = *min_s;
      if (exact_min) entry["min_location_error"] = std::abs(*min_s - exact_min->s);
    } else {
      entry["min_s"] = nullptr;
    }
    results["orders"].push_back(std::move(entry));
  }
  report.document["results"] = std::move(results);

  auto& plot = plot_block(report.document, "taylor_validity.png", "s", "f1^2",
                          "series approximations of the restriction flow");
  plot["series"].push_back(plot_series("taylor.csv", 1, 2, "exact", "lines"));
  for (std::size_t k = 0; k < polys.size(); ++k)
    plot["series"].push_back(plot_series("taylor.csv", 1, static_cast<int>(3 + k),
                                         "order " + std::to_string(config.poly_orders[k]),
                                         "lines dashtype 2"));
}

void run_bhmm_compare(const ExperimentConfig& config, const Matrix& h0,
                      const CostFunction& cost, RunReport& report) {
  std::vector<GeneratorSpec> specs = config.generators;
  std::vector<std::string> labels = config.generator_labels;
  if (specs.empty()) {
    labels = {"minmax", "maxmin", "shuffled", "sampled", "eigen", "dephasing"};
    for (const auto& name : labels)
      specs.push_back(make_preset(name, config.model.n_qubits, config.rng_seed));
  }

  ordered_json runs = ordered_json::array();
  std::string best_name;
  double best_f1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto state = dbi_run(h0, comparison_policy(specs[i]), config.schedule, cost,
                               config.n_steps, config.min_relative_gain);
    const auto run = summarize(labels[i], state, cost);
    write_run_csv(report, report.csv_files, "traj_" + labels[i] + ".csv", run.state);
    runs.push_back(summary_json(run));
    if (run.final_f1 < best_f1) {
      best_f1 = run.final_f1;
      best_name = run.name;
    }
  }

  ordered_json results;
  results["runs"] = std::move(runs);
  results["best"] = ordered_json{};
  results["best"]["name"] = best_name;
  results["best"]["final_f1"] = best_f1;
  report.document["results"] = std::move(results);

  auto& plot = plot_block(report.document, "bhmm_compare.png", "step", "f1",
                          "fixed diagonal generators");
  for (const auto& label : labels)
    plot["series"].push_back(plot_series("traj_" + label + ".csv", 1, 5, label, "linespoints"));
}

void run_adaptive_compare(const ExperimentConfig& config, const Matrix& h0,
                          const CostFunction& cost, RunReport& report) {
  std::vector<std::string> families = config.families;
  if (families.empty()) families = {"magnetic-field", "nn-ising", "pauli-z", "full-diagonal"};

  // Fixed-generator baseline, summarized only; the plot keeps its best value.
  std::vector<GeneratorSpec> baseline_specs = config.generators;
  std::vector<std::string> baseline_labels = config.generator_labels;
  if (baseline_specs.empty()) {
    for (const auto& preset : generator_presets()) {
      baseline_labels.push_back(preset.name);
      baseline_specs.push_back(make_preset(preset.name, config.model.n_qubits, config.rng_seed));
    }
  }

  ordered_json baseline = ordered_json::array();
  std::string best_fixed_name;
  double best_fixed_f1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < baseline_specs.size(); ++i) {
    const auto state = dbi_run(h0, comparison_policy(baseline_specs[i]), config.schedule, cost,
                               config.n_steps, config.min_relative_gain);
    const auto run = summarize(baseline_labels[i], state, cost);
    baseline.push_back(summary_json(run));
    if (run.final_f1 < best_fixed_f1) {
      best_fixed_f1 = run.final_f1;
      best_fixed_name = run.name;
    }
  }

  ordered_json adaptive = ordered_json::array();
  for (const auto& family : families) {
    const auto state = dbi_run(h0, family_policy(family, config.gd), config.schedule, cost,
                               config.n_steps, config.min_relative_gain);
    const auto run = summarize(family, state, cost);
    write_run_csv(report, report.csv_files, "traj_" + family + ".csv", run.state);
    adaptive.push_back(summary_json(run));
  }

  ordered_json results;
  results["families"] = std::move(adaptive);
  results["fixed_baseline"] = std::move(baseline);
  results["best_fixed"] = ordered_json{};
  results["best_fixed"]["name"] = best_fixed_name;
  results["best_fixed"]["final_f1"] = best_fixed_f1;
  report.document["results"] = std::move(results);

  auto& plot = plot_block(report.document, "adaptive_compare.png", "step", "f1",
                          "adaptive generator families");
  for (const auto& family : families)
    plot["series"].push_back(plot_series("traj_" + family + ".csv", 1, 5, family, "linespoints"));
  ordered_json refline;
  refline["y"] = best_fixed_f1;
  refline["title"] = "best fixed diagonal (" + best_fixed_name + ")";
  plot["reflines"] = ordered_json::array({std::move(refline)});
}

void run_gc_compare(const ExperimentConfig& config, const Matrix& h0,
                    const CostFunction& /*cost*/, RunReport& report) {
  const Matrix d =
      config.generators.empty() ? delta_restrict(h0) : realize(config.generators.front(), h0);
  const double s_max = config.scan_max > 0 ? config.scan_max : config.schedule.s_max;
  const int n = config.scan_points > 0 ? config.scan_points : config.schedule.n_points;

  const DbrCurve curve(h0, d);
  const CostFunction f1_cost = cost_f1();
  double min_exact = std::numeric_limits<double>::infinity(), min_exact_s = 0.0;
  double min_gc = min_exact, min_gc_s = 0.0;
  double min_hopf = min_exact, min_hopf_s = 0.0;
  {
    auto os = open_text(report.directory / "formulas.csv");
    os << "s,f1_exact,f1_gc,f1_hopf,err_gc,err_hopf\n";
    for (int i = 1; i <= n; ++i) {
      const double s = s_max * i / n;
      const double f1_exact = evaluate(f1_cost, curve.at(s));
      const double f1_gc =
          evaluate(f1_cost, formula_dbr_step(h0, d, s, FormulaKind::GroupCommutator));
      const double f1_hopf = evaluate(f1_cost, formula_dbr_step(h0, d, s, FormulaKind::Hopf));
      const Matrix r = curve.rotation(s);
      const double err_gc = approx_error(gc_unitary(h0, d, s), r);
      const double err_hopf = approx_error(hopf_unitary(h0, d, s), r);
      os << format_float(s) << "," << format_float(f1_exact) << "," << format_float(f1_gc)
         << "," << format_float(f1_hopf) << "," << format_float(err_gc) << ","
         << format_float(err_hopf) << "\n";
      if (f1_exact < min_exact) { min_exact = f1_exact; min_exact_s = s; }
      if (f1_gc < min_gc) { min_gc = f1_gc; min_gc_s = s; }
      if (f1_hopf < min_hopf) { min_hopf = f1_hopf; min_hopf_s = s; }
    }
  }
  report.csv_files.push_back("formulas.csv");

  const auto fit_gc = error_order_fit(h0, d, FormulaKind::GroupCommutator, config.fit_s_lo,
                                      config.fit_s_hi, 9);
  const auto fit_hopf =
      error_order_fit(h0, d, FormulaKind::Hopf, config.fit_s_lo, config.fit_s_hi, 9);

  ordered_json results;
  results["slope_gc"] = fit_gc.slope;
  results["slope_hopf"] = fit_hopf.slope;
  results["queries_gc"] = hamiltonian_queries(FormulaKind::GroupCommutator);
  results["queries_hopf"] = hamiltonian_queries(FormulaKind::Hopf);
  results["min_f1_exact"] = ordered_json{};
  results["min_f1_exact"]["s"] = min_exact_s;
  results["min_f1_exact"]["value"] = min_exact;
  results["min_f1_gc"] = ordered_json{};
  results["min_f1_gc"]["s"] = min_gc_s;
  results["min_f1_gc"]["value"] = min_gc;
  results["min_f1_hopf"] = ordered_json{};
  results["min_f1_hopf"]["s"] = min_hopf_s;
  results["min_f1_hopf"]["value"] = min_hopf;
  report.document["results"] = std::move(results);

  auto& plot = plot_block(report.document, "gc_compare.png", "s", "f1",
                          "product-formula rotations vs the exact flow");
  plot["series"].push_back(plot_series("formulas.csv", 1, 2, "exact", "lines"));
  plot["series"].push_back(plot_series("formulas.csv", 1, 3, "group commutator", "lines"));
  plot["series"].push_back(plot_series("formulas.csv", 1, 4, "higher-order formula", "lines"));
}

void run_dbi_run(const ExperimentConfig& config, const Matrix& h0, const CostFunction& cost,
                 RunReport& report) {
  GeneratorPolicy policy;
  if (config.policy == "fixed") {
    policy = GeneratorPolicy::fixed(config.generators.empty()
                                        ? spectral_generator(GeneratorKind::Dephasing)
                                        : config.generators.front());
  } else if (config.policy == "canonical") {
    policy = GeneratorPolicy::canonical();
  } else if (config.policy == "adaptive-gd") {
    policy = GeneratorPolicy::adaptive_gradient(config.generators.empty()
                                                    ? make_family("magnetic-field")
                                                    : config.generators.front(),
                                                config.gd);
  } else if (config.policy == "adaptive-hamming") {
    policy = GeneratorPolicy::adaptive_hamming();
  } else {
    fail("policy: unknown value \"" + config.policy + "\"");
  }

  const auto state =
      dbi_run(h0, policy, config.schedule, cost, config.n_steps, config.min_relative_gain);
  const auto run = summarize("dbi-run", state, cost);
  write_run_csv(report, report.csv_files, "trajectory.csv", run.state);

  ordered_json results = summary_json(run);
  results.erase("name");
  results["policy"] = config.policy;
  results["step_records"] = ordered_json::array();
  int index = 1;
  for (const auto& step : run.state.steps) {
    ordered_json record;
    record["step"] = index++;
    record["s"] = step.s;
    record["cost_before"] = step.cost_before;
    record["cost_after"] = step.cost_after;
    record["f1"] = step.f1_after;
    record["generator"] = generator_tag(step.generator);
    results["step_records"].push_back(std::move(record));
  }
  report.document["results"] = std::move(results);

  auto& plot = plot_block(report.document, "dbi_run.png", "step", "f1", "iteration trajectory");
  plot["series"].push_back(plot_series("trajectory.csv", 1, 5, config.policy, "linespoints"));
}

}  // namespace

Matrix build_model(const ModelConfig& model) {
  if (model.n_qubits < 2) fail("model: need at least 2 qubits");
  if (model.n_qubits > 12 && !model.allow_large)
    fail("model: " + std::to_string(model.n_qubits) +
         " qubits exceeds the 12-qubit memory guard; set allow_large to override");
  if (!std::isfinite(model.coupling)) fail("model: coupling must be finite");
  if (model.name == "tfim") return tfim(model.n_qubits, model.coupling);
  if (model.name == "xxz") return xxz(model.n_qubits, model.coupling);
  fail("model: unknown name \"" + model.name + "\" (expected \"tfim\" or \"xxz\")");
}

const std::vector<PresetInfo>& generator_presets() {
  static const std::vector<PresetInfo> presets = {
      {"minmax", "equidistant diagonal spanning the context range, natural basis order"},
      {"maxmin", "the minmax values in reversed basis order"},
      {"shuffled", "seeded permutation of the minmax values"},
      {"sampled", "seeded draws from the minmax values, sorted ascending"},
      {"eigen", "context eigenvalues, ascending"},
      {"dephasing", "diagonal restriction of the context Hamiltonian"},
      {"b-constant", "uniform field sum_j Z_j"},
      {"b-linear", "linearly ramped field sum_j j Z_j"},
      {"b-quadratic", "quadratically ramped field sum_j j^2 Z_j"},
      {"nn-ising", "unit nearest-neighbour Ising ring sum_j Z_j Z_{j+1}"},
      {"a2a-ising", "unit all-to-all Ising sum_{j<j'} Z_j Z_{j'}"},
      {"pauli-z", "full Pauli-Z product Z_1 ... Z_L"},
      {"full-diagonal", "explicit diagonal entries; defaults to the context diagonal"},
  };
  return presets;
}

GeneratorSpec make_preset(const std::string& name, int n_qubits, std::uint64_t seed) {
  if (n_qubits < 1) fail("preset: n_qubits must be positive");
  const auto L = static_cast<Eigen::Index>(n_qubits);
  if (name == "minmax") return spectral_generator(GeneratorKind::MinMax);
  if (name == "maxmin") return spectral_generator(GeneratorKind::MaxMin);
  if (name == "shuffled") return spectral_generator(GeneratorKind::ShuffledMinMax, seed);
  if (name == "sampled") return spectral_generator(GeneratorKind::SampledMinMax, seed);
  if (name == "eigen") return spectral_generator(GeneratorKind::EigenSorted);
  if (name == "dephasing") return spectral_generator(GeneratorKind::Dephasing);
  if (name == "b-constant") return magnetic_field(RealVector::Ones(L));
  if (name == "b-linear")
    return magnetic_field(RealVector::LinSpaced(L, 1.0, static_cast<double>(L)));
  if (name == "b-quadratic") {
    RealVector alpha(L);
    for (Eigen::Index j = 0; j < L; ++j) alpha[j] = static_cast<double>((j + 1) * (j + 1));
    return magnetic_field(alpha);
  }
  if (name == "nn-ising")
    return nn_ising(RealVector::Zero(L), RealVector::Ones(L), Boundary::Periodic);
  if (name == "a2a-ising") return all_to_all_ising(RealVector::Zero(L), RealMatrix::Ones(L, L));
  if (name == "pauli-z") return pauli_z_product(std::string(static_cast<std::size_t>(L), '1'));
  if (name == "full-diagonal") return full_diagonal(RealVector());
  fail("unknown generator preset \"" + name + "\"");
}

GeneratorSpec make_family(const std::string& name) {
  if (name == "magnetic-field") return magnetic_field(RealVector());
  if (name == "nn-ising") return nn_ising(RealVector(), RealVector(), Boundary::Open);
  if (name == "a2a-ising") return all_to_all_ising(RealVector(), RealMatrix());
  if (name == "full-diagonal") return full_diagonal(RealVector());
  fail("unknown adaptive family \"" + name +
       "\" (pauli-z runs through the exhaustive product search)");
}

ExperimentConfig parse_config(const nlohmann::ordered_json& doc) {
  require_object(doc, "config");
  check_keys(doc,
             {"experiment", "model", "allow_large", "schedule", "cost", "reference_state",
              "reference_d", "generators", "families", "policy", "gd", "n_steps",
              "min_relative_gain", "rng_seed", "poly_orders", "scan_max", "scan_points",
              "fit_s_lo", "fit_s_hi", "output_dir"},
             "config");

  ExperimentConfig config;
  config.raw = doc;

  const auto* experiment = find(doc, "experiment");
  if (!experiment) fail("config: missing \"experiment\"");
  config.experiment = as_string(*experiment, "experiment");
  static const char* known[] = {"schedule-scan",    "taylor-validity", "bhmm-compare",
                                "adaptive-compare", "gc-compare",      "dbi-run"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* e) {
        return config.experiment == e;
      }) == std::end(known))
    fail("experiment: unknown name \"" + config.experiment + "\"");

  if (const auto* seed = find(doc, "rng_seed")) config.rng_seed = as_seed(*seed, "rng_seed");

  if (const auto* model = find(doc, "model")) {
    require_object(*model, "model");
    check_keys(*model, {"name", "L", "h", "delta"}, "model");
    if (const auto* name = find(*model, "name"))
      config.model.name = as_string(*name, "model.name");
    if (config.model.name != "tfim" && config.model.name != "xxz")
      fail("model.name: expected \"tfim\" or \"xxz\"");
    config.model.coupling = config.model.name == "xxz" ? 0.5 : 3.0;
    if (const auto* L = find(*model, "L")) config.model.n_qubits = as_int(*L, "model.L");
    if (const auto* h = find(*model, "h")) {
      if (config.model.name != "tfim") fail("model.h: only the tfim model takes a field h");
      config.model.coupling = as_double(*h, "model.h");
    }
    if (const auto* delta = find(*model, "delta")) {
      if (config.model.name != "xxz")
        fail("model.delta: only the xxz model takes an anisotropy delta");
      config.model.coupling = as_double(*delta, "model.delta");
    }
  }
  if (const auto* allow = find(doc, "allow_large"))
    config.model.allow_large = as_bool(*allow, "allow_large");
  if (config.model.n_qubits < 2) fail("model.L: need at least 2 qubits");
  if (config.model.n_qubits > 12 && !config.model.allow_large)
    fail("model.L: " + std::to_string(config.model.n_qubits) +
         " exceeds the 12-qubit memory guard; set allow_large to override");

  if (const auto* sched = find(doc, "schedule")) {
    require_object(*sched, "schedule");
    check_keys(*sched, {"strategy", "s_max", "n_points", "poly_order", "rng_seed",
                        "fallback_to_grid"},
               "schedule");
    if (const auto* strategy = find(*sched, "strategy")) {
      const std::string s = as_string(*strategy, "schedule.strategy");
      if (s == "grid")
        config.schedule.strategy = ScheduleStrategy::Grid;
      else if (s == "random")
        config.schedule.strategy = ScheduleStrategy::Random;
      else if (s == "taylor")
        config.schedule.strategy = ScheduleStrategy::Taylor;
      else
        fail("schedule.strategy: expected \"grid\", \"random\", or \"taylor\"");
    }
    if (const auto* s_max = find(*sched, "s_max")) {
      config.schedule.s_max = as_double(*s_max, "schedule.s_max");
      if (!(config.schedule.s_max > 0)) fail("schedule.s_max: must be positive");
    }
    if (const auto* n_points = find(*sched, "n_points")) {
      config.schedule.n_points = as_int(*n_points, "schedule.n_points");
      if (config.schedule.n_points < 1) fail("schedule.n_points: must be positive");
    }
    if (const auto* order = find(*sched, "poly_order")) {
      config.schedule.poly_order = as_int(*order, "schedule.poly_order");
      if (config.schedule.poly_order < 2) fail("schedule.poly_order: must be at least 2");
    }
    if (const auto* seed = find(*sched, "rng_seed"))
      config.schedule.rng_seed = as_seed(*seed, "schedule.rng_seed");
    if (const auto* fallback = find(*sched, "fallback_to_grid"))
      config.schedule.fallback_to_grid = as_bool(*fallback, "schedule.fallback_to_grid");
  }
  if (config.schedule.strategy == ScheduleStrategy::Random && !config.schedule.rng_seed)
    config.schedule.rng_seed = config.rng_seed;

  if (const auto* cost = find(doc, "cost"))
    config.cost_kind = cost_from_name(as_string(*cost, "cost"), "cost");
  if (const auto* ref = find(doc, "reference_state")) {
    if (ref->is_string()) {
      if (ref->get<std::string>() != "random")
        fail("reference_state: expected a basis index or \"random\"");
      config.reference_state_random = true;
    } else {
      const int index = as_int(*ref, "reference_state");
      if (index < 0) fail("reference_state: index must be nonnegative");
      config.reference_state_index = index;
    }
  }
  if (const auto* ref_d = find(doc, "reference_d"))
    config.reference_d =
        parse_generator(*ref_d, config.model.n_qubits, config.rng_seed, "reference_d").first;

  if (const auto* gens = find(doc, "generators")) {
    if (!gens->is_array()) fail("generators: expected an array");
    for (const auto& node : *gens) {
      auto [spec, label] =
          parse_generator(node, config.model.n_qubits, config.rng_seed, "generators");
      std::string unique = label;
      int suffix = 1;
      while (std::find(config.generator_labels.begin(), config.generator_labels.end(),
                       unique) != config.generator_labels.end())
        unique = label + "-" + std::to_string(++suffix);
      config.generators.push_back(std::move(spec));
      config.generator_labels.push_back(std::move(unique));
    }
  }

  if (const auto* families = find(doc, "families")) {
    if (!families->is_array()) fail("families: expected an array of family names");
    static const char* kFamilies[] = {"magnetic-field", "nn-ising", "a2a-ising", "pauli-z",
                                      "full-diagonal"};
    for (const auto& node : *families) {
      const std::string name = as_string(node, "families");
      if (std::find_if(std::begin(kFamilies), std::end(kFamilies), [&](const char* f) {
            return name == f;
          }) == std::end(kFamilies))
        fail("families: unknown family \"" + name + "\"");
      config.families.push_back(name);
    }
  }

  if (const auto* policy = find(doc, "policy")) {
    config.policy = as_string(*policy, "policy");
    static const char* kPolicies[] = {"fixed", "canonical", "adaptive-gd", "adaptive-hamming"};
    if (std::find_if(std::begin(kPolicies), std::end(kPolicies), [&](const char* p) {
          return config.policy == p;
        }) == std::end(kPolicies))
      fail("policy: expected \"fixed\", \"canonical\", \"adaptive-gd\", or \"adaptive-hamming\"");
  }

  if (const auto* gd = find(doc, "gd")) {
    require_object(*gd, "gd");
    check_keys(*gd, {"max_iters", "fd_step", "initial_rate", "backtrack_shrink", "armijo_c",
                     "tol", "project_unit_norm"},
               "gd");
    if (const auto* v = find(*gd, "max_iters")) {
      config.gd.max_iters = as_int(*v, "gd.max_iters");
      if (config.gd.max_iters < 1) fail("gd.max_iters: must be positive");
    }
    if (const auto* v = find(*gd, "fd_step")) {
      config.gd.fd_step = as_double(*v, "gd.fd_step");
      if (!(config.gd.fd_step > 0)) fail("gd.fd_step: must be positive");
    }
    if (const auto* v = find(*gd, "initial_rate")) {
      config.gd.initial_rate = as_double(*v, "gd.initial_rate");
      if (!(config.gd.initial_rate > 0)) fail("gd.initial_rate: must be positive");
    }
    if (const auto* v = find(*gd, "backtrack_shrink")) {
      config.gd.backtrack_shrink = as_double(*v, "gd.backtrack_shrink");
      if (!(config.gd.backtrack_shrink > 0 && config.gd.backtrack_shrink < 1))
        fail("gd.backtrack_shrink: must lie in (0, 1)");
    }
    if (const auto* v = find(*gd, "armijo_c")) {
      config.gd.armijo_c = as_double(*v, "gd.armijo_c");
      if (!(config.gd.armijo_c > 0 && config.gd.armijo_c < 1))
        fail("gd.armijo_c: must lie in (0, 1)");
    }
    if (const auto* v = find(*gd, "tol")) {
      config.gd.tol = as_double(*v, "gd.tol");
      if (config.gd.tol < 0) fail("gd.tol: must be nonnegative");
    }
    if (const auto* v = find(*gd, "project_unit_norm"))
      config.gd.project_unit_norm = as_bool(*v, "gd.project_unit_norm");
  }

  if (const auto* n_steps = find(doc, "n_steps")) {
    config.n_steps = as_int(*n_steps, "n_steps");
    if (config.n_steps < 0) fail("n_steps: must be nonnegative");
  }
  if (const auto* gain = find(doc, "min_relative_gain"))
    config.min_relative_gain = as_double(*gain, "min_relative_gain");
  if (const auto* orders = find(doc, "poly_orders")) {
    if (!orders->is_array() || orders->empty())
      fail("poly_orders: expected a nonempty array of integers");
    config.poly_orders.clear();
    for (const auto& node : *orders) {
      const int order = as_int(node, "poly_orders");
      if (order < 2) fail("poly_orders: orders must be at least 2");
      config.poly_orders.push_back(order);
    }
  }
  if (const auto* scan_max = find(doc, "scan_max")) {
    config.scan_max = as_double(*scan_max, "scan_max");
    if (config.scan_max < 0) fail("scan_max: must be nonnegative");
  }
  if (const auto* scan_points = find(doc, "scan_points")) {
    config.scan_points = as_int(*scan_points, "scan_points");
    if (config.scan_points < 0) fail("scan_points: must be nonnegative");
  }
  if (const auto* lo = find(doc, "fit_s_lo")) config.fit_s_lo = as_double(*lo, "fit_s_lo");
  if (const auto* hi = find(doc, "fit_s_hi")) config.fit_s_hi = as_double(*hi, "fit_s_hi");
  if (!(config.fit_s_lo > 0) || !(config.fit_s_hi > config.fit_s_lo))
    fail("fit_s_lo/fit_s_hi: need 0 < fit_s_lo < fit_s_hi");
  if (const auto* out = find(doc, "output_dir")) {
    const std::string dir = as_string(*out, "output_dir");
    if (dir.empty()) fail("output_dir: must not be empty");
    config.output_dir = dir;
  }

  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

RunReport run_experiment(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();

  RunReport report;
  report.directory = config.output_dir;
  if (const char* env = std::getenv("DBI_OUTPUT_DIR")) {
    if (*env) report.directory = env;
  }
  std::filesystem::create_directories(report.directory);

  const Matrix h0 = build_model(config.model);
  const CostFunction cost = build_cost(config, h0);

  ordered_json& doc = report.document;
  doc["schema_version"] = 1;
  doc["experiment"] = config.experiment;
  if (config.raw.is_null()) {
    ordered_json model_echo;
    model_echo["name"] = config.model.name;
    model_echo["L"] = config.model.n_qubits;
    model_echo[config.model.name == "xxz" ? "delta" : "h"] = config.model.coupling;
    ordered_json echo;
    echo["experiment"] = config.experiment;
    echo["model"] = std::move(model_echo);
    echo["rng_seed"] = config.rng_seed;
    doc["config"] = std::move(echo);
  } else {
    doc["config"] = config.raw;
  }

  if (config.experiment == "schedule-scan")
    run_schedule_scan(config, h0, cost, report);
  else if (config.experiment == "taylor-validity")
    run_taylor_validity(config, h0, cost, report);
  else if (config.experiment == "bhmm-compare")
    run_bhmm_compare(config, h0, cost, report);
  else if (config.experiment == "adaptive-compare")
    run_adaptive_compare(config, h0, cost, report);
  else if (config.experiment == "gc-compare")
    run_gc_compare(config, h0, cost, report);
  else if (config.experiment == "dbi-run")
    run_dbi_run(config, h0, cost, report);
  else
    fail("experiment: unknown name \"" + config.experiment + "\"");

  doc["csv_files"] = report.csv_files;

  {
    auto os = open_text(report.directory / "report.json");
    os << doc.dump(2) << "\n";
  }
  report.plot_script = "plot.gp";
  emit_plot_script(report);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::filesystem::path emit_plot_script(const RunReport& report) {
  if (!report.document.contains("plot"))
    throw std::runtime_error("emit_plot_script: report carries no plot block");
  const auto& plot = report.document.at("plot");
  const std::string script = plot.at("script").get<std::string>();
  const auto path = report.directory / script;
  auto os = open_text(path);

  os << "# regenerate with: gnuplot " << script << "\n";
  os << "set terminal pngcairo size 1000,700\n";
  os << "set output \"" << plot.at("output").get<std::string>() << "\"\n";
  os << "set datafile separator \",\"\n";
  os << "set xlabel \"" << plot.at("xlabel").get<std::string>() << "\"\n";
  os << "set ylabel \"" << plot.at("ylabel").get<std::string>() << "\"\n";
  os << "set title \"" << plot.at("title").get<std::string>() << "\"\n";
  os << "set key top right\n";
  if (plot.contains("arrows"))
    for (const auto& x : plot.at("arrows")) {
      const std::string sx = format_float(x.get<double>());
      os << "set arrow from " << sx << ", graph 0 to " << sx
         << ", graph 1 nohead dashtype 2\n";
    }

  std::vector<std::string> items;
  for (const auto& series : plot.at("series")) {
    std::string item = "\"" + series.at("csv").get<std::string>() + "\" using " +
                       std::to_string(series.at("x").get<int>()) + ":" +
                       std::to_string(series.at("y").get<int>()) + " with " +
                       series.at("style").get<std::string>() + " title \"" +
                       series.at("title").get<std::string>() + "\"";
    items.push_back(std::move(item));
  }
  if (plot.contains("reflines"))
    for (const auto& line : plot.at("reflines"))
      items.push_back(format_float(line.at("y").get<double>()) +
                      " with lines dashtype 3 linecolor rgb \"gray\" title \"" +
                      line.at("title").get<std::string>() + "\"");

  if (items.empty()) {
    os << "plot NaN notitle\n";
    return path;
  }
  os << "plot \\\n";
  for (std::size_t i = 0; i < items.size(); ++i)
    os << "  " << items[i] << (i + 1 < items.size() ? ", \\\n" : "\n");
  return path;
}

}  // namespace dbi
