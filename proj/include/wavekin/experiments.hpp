#ifndef WAVEKIN_EXPERIMENTS_HPP
#define WAVEKIN_EXPERIMENTS_HPP

#include "wavekin/config.hpp"
#include "wavekin/ensemble.hpp"
#include "wavekin/kinetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wavekin {

struct RunOptions {
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

struct ExperimentReport {
  std::vector<std::uint64_t> seeds;
  std::string summary_json = "{}";
  bool pass = true;
};

/// Monte-Carlo spectrum against the WKE at one box size. The WKE runs on the
/// grid h = 1/L, whose nodes are the modes of the box.
struct ComparePoint {
  double L = 0.0;
  std::shared_ptr<const ModeSet> modes;
  Eigen::VectorXd n_in;
  Eigen::VectorXd mc_mean;
  Eigen::VectorXd mc_stderr;
  Eigen::VectorXd wke;
  std::vector<std::uint64_t> seeds;
  std::size_t peak = 0;
  double peak_relative_defect = 0.0;
  double sup_defect = 0.0;
  double sup_stderr = 0.0;
  bool pass = false;
};

ComparePoint compare_at(const ExperimentConfig& c, double L, const RunOptions& options = {});

/// Physical end time of a dynamic experiment at box size L.
double end_time(const ExperimentConfig& c, const BoxSpec& box);

/// Runs the experiment and writes its CSV and text outputs into `dir`.
ExperimentReport run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir,
                                const RunOptions& options = {});

}  // namespace wavekin

#endif  // WAVEKIN_EXPERIMENTS_HPP
