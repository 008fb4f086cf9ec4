#ifndef WAVEKIN_CONFIG_HPP
#define WAVEKIN_CONFIG_HPP

#include "wavekin/evolver.hpp"
#include "wavekin/fields.hpp"
#include "wavekin/kinetic.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavekin {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"census", "first-iterate", "wke", "ensemble",
                                              "compare", "diagrams", "chaos"};
  return names;
}

/// Parsed experiment configuration. Every key lives in an INI section; the
/// schema is documented in the README.
struct ExperimentConfig {
  std::string experiment;

  // [box]
  BoxSpec box;
  std::vector<double> L_values;

  // [spectrum], [noise]
  SpectrumFamily spectrum;
  NoiseLaw law = NoiseLaw::gaussian;

  // [evolve]
  EvolveConfig evolve;
  /// Kinetic-time horizon; when set, t_end = tau * T_kin for each box.
  std::optional<double> tau;
  std::vector<double> snapshot_taus;

  // [ensemble]
  std::int64_t M = 100;
  std::uint64_t base_seed = 1;
  std::vector<WaveVector> tracked;

  // [kinetic]
  std::optional<double> h;
  std::optional<double> width;
  KernelKind kernel = KernelKind::gaussian;
  double dtau = 0.01;
  double compare_tolerance = 0.15;

  // [census]
  std::vector<std::vector<double>> census_betas;
  std::vector<double> census_times;
  WaveVector k = WaveVector::Zero();

  // [first_iterate]
  std::vector<double> times;
  std::optional<double> fine_h;

  // [diagrams]
  int max_order = 2;
  double window = 0.5;

  std::string output;

  /// Every key = value pair that was read, in file order, for the manifest.
  std::vector<std::pair<std::string, std::string>> echo;

  BoxSpec box_at(double L) const;
};

/// Reads an INI file. Unknown keys and malformed values raise ConfigError
/// naming the section, key and line.
ExperimentConfig load_config(const std::string& path, const std::string& experiment);

ExperimentConfig parse_config(const std::string& text, const std::string& experiment,
                              const std::string& origin = "<config>");

}  // namespace wavekin

#endif  // WAVEKIN_CONFIG_HPP
