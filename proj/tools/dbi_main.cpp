#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <mutex>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dbi/experiments.hpp"

namespace {

std::mutex g_io_mutex;

void say(const std::string& line) {
  std::scoped_lock lock(g_io_mutex);
  std::cerr << line << "\n";
}

// 0 = done, 2 = bad config, 3 = numerical/runtime failure (partial outputs kept).
int run_one(const std::filesystem::path& path) {
  dbi::ExperimentConfig config;
  try {
    config = dbi::load_config(path);
  } catch (const std::exception& e) {
    say(std::string("error: ") + e.what());
    return 2;
  }
  try {
    const auto report = dbi::run_experiment(config);
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs", report.wall_seconds);
    say(path.string() + ": " + config.experiment + " -> " + report.directory.string() + " (" +
        timing + ")");
    return 0;
  } catch (const std::exception& e) {
    say(path.string() + ": error: " + std::string(e.what()));
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-bracket iteration laboratory"};
  app.require_subcommand(1);

  std::vector<std::string> run_paths;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "execute experiment configs");
  run->add_option("configs", run_paths, "JSON experiment configs")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("-j,--jobs", jobs, "worker pool size (default: one per config, capped)");

  auto* presets = app.add_subcommand("presets", "list the diagonal-generator presets");

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "parse and check configs without running");
  validate->add_option("configs", validate_paths, "JSON experiment configs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (presets->parsed()) {
    for (const auto& preset : dbi::generator_presets())
      std::printf("%-14s %s\n", preset.name.c_str(), preset.description.c_str());
    return 0;
  }

  if (validate->parsed()) {
    int worst = 0;
    for (const auto& path : validate_paths) {
      try {
        dbi::load_config(path);
        std::printf("%s: ok\n", path.c_str());
      } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        worst = 2;
      }
    }
    return worst;
  }

  // run: validate everything up front so a typo in one config fails fast.
  {
    int worst = 0;
    for (const auto& path : run_paths) {
      try {
        dbi::load_config(path);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        worst = 2;
      }
    }
    if (worst) return worst;
  }

  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const auto wanted = jobs > 0 ? static_cast<unsigned>(jobs)
                               : std::min<unsigned>(hardware, run_paths.size());
  std::counting_semaphore<> slots(std::max(1u, wanted));

  std::vector<std::future<int>> results;
  results.reserve(run_paths.size());
  for (const auto& path : run_paths)
    results.push_back(std::async(std::launch::async, [&slots, path] {
      slots.acquire();
      const int code = run_one(path);
      slots.release();
      return code;
    }));

  int worst = 0;
  for (auto& result : results) worst = std::max(worst, result.get());
  return worst;
}
