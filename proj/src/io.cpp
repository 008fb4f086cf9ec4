#include "wavekin/io.hpp"

#include <boost/crc.hpp>
#include "json.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

namespace wavekin {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint32_t crc32_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  boost::crc_32_type crc;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    crc.process_bytes(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return crc.checksum();
}

fs::path resolve_output_dir(const std::optional<std::string>& cli_out, const std::string& config_out,
                            const std::string& experiment) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (!config_out.empty()) return config_out;
  if (const char* root = std::getenv(kOutputRootVariable); root && *root) return fs::path(root) / experiment;
  return fs::path("wavekin-out") / experiment;
}

StagedOutput::StagedOutput(fs::path final_dir) : final_(std::move(final_dir)) {
  if (final_.filename().empty()) final_ = final_.parent_path();
  if (fs::exists(final_) && !fs::is_empty(final_))
    throw std::runtime_error("output directory " + final_.string() + " exists and is not empty");
  staging_ = final_;
  staging_ += ".partial";
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

StagedOutput::~StagedOutput() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void StagedOutput::commit() {
  if (fs::exists(final_)) fs::remove(final_);
  if (final_.has_parent_path()) fs::create_directories(final_.parent_path());
  fs::rename(staging_, final_);
  committed_ = true;
}

namespace {

std::vector<fs::path> listed_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    fs::path rel = fs::relative(e.path(), dir);
    if (rel == kManifestName) continue;
    out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string hex(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

}  // namespace

void write_manifest(const fs::path& dir, const ManifestInfo& info) {
  json m;
  m["tool"] = "wavekin";
  m["version"] = kVersion;
  m["experiment"] = info.experiment;
  m["config_path"] = info.config_path;
  json echo = json::object();
  for (const auto& [k, v] : info.echo) echo[k] = v;
  m["config"] = echo;
  m["seeds"] = info.seeds;
  m["wall_seconds"] = info.wall_seconds;
  m["summary"] = json::parse(info.summary_json);
  json files = json::array();
  for (const auto& rel : listed_files(dir)) {
    files.push_back({{"name", rel.generic_string()},
                     {"bytes", fs::file_size(dir / rel)},
                     {"crc32", hex(crc32_file(dir / rel))}});
  }
  m["files"] = files;
  std::ofstream os(dir / kManifestName);
  os << m.dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write manifest in " + dir.string());
}

std::vector<std::string> verify_manifest(const fs::path& dir) {
  std::ifstream in(dir / kManifestName);
  if (!in) return {kManifestName};
  const json m = json::parse(in);
  std::vector<std::string> bad;
  std::set<std::string> seen;
  for (const auto& f : m.at("files")) {
    const std::string name = f.at("name");
    seen.insert(name);
    if (!fs::exists(dir / name) || hex(crc32_file(dir / name)) != f.at("crc32").get<std::string>()) bad.push_back(name);
  }
  for (const auto& rel : listed_files(dir)) {
    if (!seen.count(rel.generic_string())) bad.push_back(rel.generic_string());
  }
  return bad;
}

}  // namespace wavekin
