#include "doctest.h"

#include "wavekin/config.hpp"
#include "wavekin/experiments.hpp"
#include "wavekin/io.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wavekin;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wavekin_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::remove_all(fs::path(p.string() + ".partial"));
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WAVEKIN_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kToy = R"([box]
d = 1
L = 1
cutoff = 1

[census]
times = 2
k = 0
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(R"(
[box]
d = 2
L = 8, 12
beta = generic
gamma = 0.75

[spectrum]
family = plateau
amplitude = 2
width = 0.3

[evolve]
tau = 0.1
dt = 0.01

[ensemble]
M = 50
seed = 9
tracked = 1,0; 0,1
)",
                              "ensemble");
  CHECK(c.box.d == 2);
  CHECK(c.L_values == std::vector<double>{8, 12});
  CHECK(c.box.beta_label == "irrational");
  CHECK(c.box_at(12).L == 12);
  CHECK(c.spectrum.kind == SpectrumKind::plateau);
  CHECK(*c.tau == 0.1);
  CHECK(*c.evolve.dt == 0.01);
  CHECK(c.M == 50);
  CHECK(c.base_seed == 9);
  REQUIRE(c.tracked.size() == 2);
  CHECK(c.tracked[1] == WaveVector(0, 1, 0));
  CHECK(c.echo.size() == 12);
  CHECK(end_time(c, c.box_at(16)) == doctest::Approx(0.1 * 64));
}

TEST_CASE("config errors name the field and line") {
  auto message = [](const std::string& text, const std::string& exp) {
    try {
      parse_config(text, exp, "x.ini");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[box]\nL = 4\n", "census").find("box.d") != std::string::npos);
  CHECK(message("[box]\nd = 2\nL = 4\nwidth = 3\n", "census").find("x.ini:4: box.width") != std::string::npos);
  CHECK(message("[box]\nd = 2\nL = four\n", "census").find("x.ini:3: box.L") != std::string::npos);
  CHECK(message("[box]\nd = 2\nL = 4\n[census]\ntimes = 1\nk = 1\n", "census").find("census.k") != std::string::npos);
  CHECK(message("[box]\nd = 2\nL = 4\n", "ensemble").find("evolve.tau") != std::string::npos);
  CHECK(message("[box]\nd = 2\nL = 4\n[nonsense]\na = 1\n", "census").find("nonsense") != std::string::npos);
  CHECK(message("[box\nd = 2\n", "census").find("x.ini:1") != std::string::npos);
  CHECK_THROWS_AS(parse_config(kToy, "plots"), ConfigError);
}

TEST_CASE("output directory resolution") {
  CHECK(resolve_output_dir(std::string("a"), "b", "census") == fs::path("a"));
  CHECK(resolve_output_dir(std::nullopt, "b", "census") == fs::path("b"));
  ::setenv(kOutputRootVariable, "/tmp/root", 1);
  CHECK(resolve_output_dir(std::nullopt, "", "census") == fs::path("/tmp/root/census"));
  ::unsetenv(kOutputRootVariable);
  CHECK(resolve_output_dir(std::nullopt, "", "wke") == fs::path("wavekin-out/wke"));
}

TEST_CASE("census toy instance through the CLI") {
  const fs::path dir = scratch("toy");
  const fs::path cfg = dir.string() + ".ini";
  write(cfg, kToy);
  REQUIRE(run_cli("census --config " + cfg.string() + " --out " + dir.string()) == 0);
  const std::string csv = slurp(dir / "census.csv");
  CHECK(csv.find("\nsquare,1,1,2,0.5,0,5,") != std::string::npos);
  CHECK(verify_manifest(dir).empty());
  const auto m = nlohmann::json::parse(slurp(dir / kManifestName));
  CHECK(m.at("files").size() == 2);
  CHECK(m.at("config").at("box.d") == "1");

  // Rerun into a fresh directory: identical tables.
  const fs::path again = scratch("toy_again");
  REQUIRE(run_cli("census --config " + cfg.string() + " --out " + again.string()) == 0);
  CHECK(slurp(again / "census.csv") == csv);
  CHECK(slurp(again / "crossover.csv") == slurp(dir / "crossover.csv"));

  // Tampering is detected.
  write(dir / "census.csv", "x");
  CHECK(verify_manifest(dir) == std::vector<std::string>{"census.csv"});
  write(dir / "extra.csv", "y");
  CHECK(verify_manifest(dir).size() == 2);
  fs::remove_all(dir);
  fs::remove_all(again);
  fs::remove(cfg);
}

TEST_CASE("missing field leaves nothing behind") {
  const fs::path dir = scratch("missing");
  const fs::path cfg = dir.string() + ".ini";
  write(cfg, "[box]\nL = 4\n");
  CHECK(run_cli("census --config " + cfg.string() + " --out " + dir.string()) != 0);
  CHECK_FALSE(fs::exists(dir));
  CHECK_FALSE(fs::exists(dir.string() + ".partial"));

  // Module failure after staging also cleans up.
  write(cfg, "[box]\nd = 1\nL = 2\ncutoff = 1\n[census]\ntimes = -1\n");
  CHECK(run_cli("census --config " + cfg.string() + " --out " + dir.string()) != 0);
  CHECK_FALSE(fs::exists(dir));
  CHECK_FALSE(fs::exists(dir.string() + ".partial"));
  fs::remove(cfg);
}

TEST_CASE("compare control run without coupling") {
  const auto c = parse_config(R"(
[box]
d = 1
L = 4
cutoff = 1
gamma = 0.5
coupling = 0

[evolve]
tau = 0.2

[ensemble]
M = 400
)",
                              "compare");
  const ComparePoint p = compare_at(c, 4.0);
  CHECK(p.pass);
  CHECK((p.wke - p.n_in).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < p.n_in.size(); ++i) CHECK(std::abs(p.mc_mean[i] - p.n_in[i]) <= 4.0 * p.mc_stderr[i]);

  const fs::path dir = scratch("compare");
  fs::create_directories(dir);
  const auto r = run_experiment(c, dir);
  CHECK(r.pass);
  CHECK(r.seeds.size() == 400);
  CHECK(slurp(dir / "compare_summary.csv").find("PASS") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("every experiment writes deterministic tables") {
  const std::string base = R"(
[box]
d = 1
L = 3
cutoff = 1
gamma = 0.5

[evolve]
tau = 0.05
snapshot_taus = 0, 0.05

[ensemble]
M = 8
tracked = 1; -1

[kinetic]
dtau = 0.01

[census]
times = 1, 4

[first_iterate]
times = 0.05

[diagrams]
max_order = 2
)";
  for (const std::string& exp : experiment_names()) {
    CAPTURE(exp);
    const auto c = parse_config(base, exp);
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    fs::create_directories(a);
    fs::create_directories(b);
    run_experiment(c, a);
    run_experiment(c, b);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
      CHECK(fs::file_size(e.path()) > 0);
    }
    CHECK(files >= 1);
    fs::remove_all(a);
    fs::remove_all(b);
  }
}
