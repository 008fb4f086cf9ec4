#ifndef WAVEKIN_IO_HPP
#define WAVEKIN_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wavekin {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kOutputRootVariable = "WAVEKIN_OUT";
inline constexpr const char* kManifestName = "manifest.json";

std::uint32_t crc32_file(const std::filesystem::path& path);

/// --out, then the config's [output] dir, then $WAVEKIN_OUT/<experiment>,
/// then ./wavekin-out/<experiment>.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out, const std::string& config_out,
                                         const std::string& experiment);

/// Staging directory `<final>.partial`. Nothing appears under the final name
/// until commit(); a staging directory left uncommitted is removed.
class StagedOutput {
 public:
  explicit StagedOutput(std::filesystem::path final_dir);
  ~StagedOutput();
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  const std::filesystem::path& dir() const { return staging_; }
  const std::filesystem::path& final_dir() const { return final_; }
  void commit();

 private:
  std::filesystem::path final_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

struct ManifestInfo {
  std::string experiment;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> echo;
  std::vector<std::uint64_t> seeds;
  double wall_seconds = 0.0;
  /// Experiment-specific summary as a JSON text.
  std::string summary_json = "{}";
};

/// Writes manifest.json listing every other regular file in `dir` (sorted,
/// recursive) with its size and CRC-32.
void write_manifest(const std::filesystem::path& dir, const ManifestInfo& info);

/// Recomputes every checksum listed in the manifest; returns the names that
/// are missing or differ, plus files present but unlisted.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

}  // namespace wavekin

#endif  // WAVEKIN_IO_HPP
