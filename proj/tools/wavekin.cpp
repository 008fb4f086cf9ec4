#include "wavekin/config.hpp"
#include "wavekin/experiments.hpp"
#include "wavekin/io.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <chrono>
#include <iostream>

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " | ") + x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wavekin;
  CLI::App app{"Wave turbulence experiments on periodic boxes"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string experiment;
  std::string config_path;
  std::optional<std::string> out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  app.add_option("experiment", experiment, join(experiment_names()))
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  app.add_option("--config", config_path, "INI experiment config")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (default: [output] dir, then $WAVEKIN_OUT/<experiment>)");
  app.add_option("--threads", threads, "cap on worker threads")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "override [ensemble] seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = load_config(config_path, experiment);
    if (threads > 0) omp_set_num_threads(threads);
    const auto dir = resolve_output_dir(out, cfg.output, experiment);
    StagedOutput staged(dir);

    const auto start = std::chrono::steady_clock::now();
    RunOptions opts;
    opts.threads = threads;
    opts.seed = seed;
    const ExperimentReport report = run_experiment(cfg, staged.dir(), opts);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ManifestInfo info;
    info.experiment = experiment;
    info.config_path = config_path;
    info.echo = cfg.echo;
    if (seed) info.echo.emplace_back("cli.seed", std::to_string(*seed));
    info.seeds = report.seeds;
    info.wall_seconds = wall;
    info.summary_json = report.summary_json;
    write_manifest(staged.dir(), info);
    staged.commit();
    std::cout << experiment << ": wrote " << staged.final_dir().string();
    if (experiment == "compare") std::cout << " [" << (report.pass ? "PASS" : "FAIL") << "]";
    std::cout << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "wavekin: config error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "wavekin: budget exceeded: " << e.what() << " (estimated cost " << e.estimated_cost() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "wavekin: " << experiment << " failed: " << e.what() << '\n';
    return 1;
  }
}
