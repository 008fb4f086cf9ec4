#include "wavekin/config.hpp"
#include "wavekin/diagrams.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wavekin {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"box", {"d", "L", "beta", "cutoff", "gamma", "coupling"}},
      {"spectrum", {"family", "amplitude", "width", "center", "table"}},
      {"noise", {"law"}},
      {"evolve", {"dt", "t_end", "tau", "scheme", "dealias", "snapshots", "snapshot_taus"}},
      {"ensemble", {"M", "seed", "tracked"}},
      {"kinetic", {"h", "width", "kernel", "dtau", "tolerance"}},
      {"census", {"betas", "times", "k"}},
      {"first_iterate", {"times", "fine_h"}},
      {"diagrams", {"max_order", "window"}},
      {"output", {"dir"}},
  };
  return s;
}

// Line of each "section.key" in the source text, for diagnostics.
std::map<std::string, int> line_index(const std::string& text) {
  std::map<std::string, int> out;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    boost::trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = boost::trim_copy(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[section + "." + boost::trim_copy(line.substr(0, eq))] = n;
  }
  return out;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::map<std::string, int> lines, std::string origin)
      : tree_(tree), lines_(std::move(lines)), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    std::ostringstream msg;
    msg << origin_;
    auto it = lines_.find(key);
    if (it != lines_.end()) msg << ':' << it->second;
    msg << ": " << key << ": " << why;
    throw ConfigError(msg.str());
  }

  std::optional<std::string> raw(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return boost::trim_copy(*v);
  }

  std::string required(const std::string& key) const {
    auto v = raw(key);
    if (!v || v->empty()) fail(key, "required field is missing");
    return *v;
  }

  double number(const std::string& key, const std::string& text) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing text");
      return v;
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + text + "'");
    }
  }

  std::optional<double> real(const std::string& key) const {
    auto v = raw(key);
    if (!v) return std::nullopt;
    return number(key, *v);
  }

  std::optional<std::int64_t> integer(const std::string& key) const {
    auto v = real(key);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v)) fail(key, "expected an integer");
    return static_cast<std::int64_t>(*v);
  }

  std::vector<double> list(const std::string& key, const std::string& text) const {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    std::vector<double> out;
    for (auto& p : parts) {
      boost::trim(p);
      if (!p.empty()) out.push_back(number(key, p));
    }
    return out;
  }

  std::vector<double> list(const std::string& key) const {
    auto v = raw(key);
    if (!v) return {};
    return list(key, *v);
  }

  std::vector<std::vector<double>> groups(const std::string& key) const {
    auto v = raw(key);
    std::vector<std::vector<double>> out;
    if (!v) return out;
    std::vector<std::string> parts;
    boost::split(parts, *v, boost::is_any_of(";"));
    for (auto& p : parts) {
      boost::trim(p);
      if (!p.empty()) out.push_back(list(key, p));
    }
    return out;
  }

 private:
  const pt::ptree& tree_;
  std::map<std::string, int> lines_;
  std::string origin_;
};

std::vector<double> beta_from_text(const Reader& r, const std::string& key, const std::string& text, int d) {
  if (text == "square") return std::vector<double>(static_cast<std::size_t>(d), 1.0);
  if (text == "generic") return generic_beta(d);
  auto b = r.list(key, text);
  if (static_cast<int>(b.size()) != d) r.fail(key, "beta needs exactly d components");
  return b;
}

WaveVector wave_vector(const Reader& r, const std::string& key, const std::vector<double>& v, int d) {
  if (static_cast<int>(v.size()) != d) r.fail(key, "wave vector needs exactly d integer components");
  WaveVector m = WaveVector::Zero();
  for (int j = 0; j < d; ++j) {
    if (v[static_cast<std::size_t>(j)] != std::floor(v[static_cast<std::size_t>(j)])) r.fail(key, "wave vector components must be integers");
    m[j] = static_cast<int>(v[static_cast<std::size_t>(j)]);
  }
  return m;
}

}  // namespace

BoxSpec ExperimentConfig::box_at(double L) const {
  BoxSpec s = box;
  s.L = L;
  s.validate();
  return s;
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment, const std::string& origin) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw ConfigError("unknown experiment '" + experiment + "'");

  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << origin << ':' << e.line() << ": " << e.message();
    throw ConfigError(msg.str());
  }
  const Reader r(tree, line_index(text), origin);

  ExperimentConfig c;
  c.experiment = experiment;
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) r.fail(section, "unknown section");
    if (!body.data().empty() && body.empty()) r.fail(section, "top-level keys are not allowed");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) r.fail(section + "." + key, "unknown key");
      c.echo.emplace_back(section + "." + key, boost::trim_copy(value.data()));
    }
  }

  // [box]
  const auto d = r.integer("box.d");
  if (!d) r.fail("box.d", "required field is missing");
  if (*d < 1 || *d > 3) r.fail("box.d", "must be 1, 2 or 3");
  c.L_values = r.list("box.L", r.required("box.L"));
  if (c.L_values.empty()) r.fail("box.L", "required field is missing");
  const std::string beta_text = r.raw("box.beta").value_or("square");
  try {
    c.box = make_box(static_cast<int>(*d), c.L_values.front(), r.real("box.cutoff").value_or(1.0),
                     r.real("box.gamma").value_or(1.0), beta_from_text(r, "box.beta", beta_text, static_cast<int>(*d)));
    for (double L : c.L_values) c.box_at(L);
  } catch (const std::invalid_argument& e) {
    r.fail("box", e.what());
  }
  c.box.coupling = r.real("box.coupling");

  // [spectrum]
  try {
    const std::string family = r.raw("spectrum.family").value_or("gaussian_bump");
    c.spectrum.kind = parse_spectrum_kind(family);
    c.spectrum.amplitude = r.real("spectrum.amplitude").value_or(1.0);
    c.spectrum.width = r.real("spectrum.width").value_or(0.5);
    const auto centre = r.list("spectrum.center");
    if (!centre.empty()) {
      if (static_cast<long>(centre.size()) != *d) r.fail("spectrum.center", "needs exactly d components");
      for (std::size_t j = 0; j < centre.size(); ++j) c.spectrum.center[static_cast<Eigen::Index>(j)] = centre[j];
    }
    if (c.spectrum.kind == SpectrumKind::custom_table) {
      const auto nodes = r.groups("spectrum.table");
      for (const auto& n : nodes) {
        if (n.size() != 2) r.fail("spectrum.table", "entries are 'radius, value' separated by ';'");
        c.spectrum.table.emplace_back(n[0], n[1]);
      }
      c.spectrum = custom_table(c.spectrum.table);
    }
    c.spectrum.validate();
    c.law = parse_noise_law(r.raw("noise.law").value_or("gaussian"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    r.fail("spectrum", e.what());
  }

  // [evolve]
  c.evolve.dt = r.real("evolve.dt");
  c.tau = r.real("evolve.tau");
  if (auto te = r.real("evolve.t_end")) c.evolve.t_end = *te;
  try {
    c.evolve.scheme = parse_scheme(r.raw("evolve.scheme").value_or("strang_split"));
  } catch (const std::invalid_argument& e) {
    r.fail("evolve.scheme", e.what());
  }
  c.evolve.dealias_factor = r.real("evolve.dealias").value_or(2.0);
  c.evolve.snapshot_times = r.list("evolve.snapshots");
  c.snapshot_taus = r.list("evolve.snapshot_taus");
  if (c.tau && r.real("evolve.t_end")) r.fail("evolve.tau", "give either tau or t_end, not both");
  if (c.tau && !(*c.tau >= 0.0)) r.fail("evolve.tau", "must be >= 0");
  if (!c.evolve.snapshot_times.empty() && !c.snapshot_taus.empty())
    r.fail("evolve.snapshot_taus", "give either snapshots or snapshot_taus, not both");

  // [ensemble]
  c.M = r.integer("ensemble.M").value_or(100);
  c.base_seed = static_cast<std::uint64_t>(r.integer("ensemble.seed").value_or(1));
  for (const auto& g : r.groups("ensemble.tracked")) c.tracked.push_back(wave_vector(r, "ensemble.tracked", g, c.box.d));

  // [kinetic]
  c.h = r.real("kinetic.h");
  c.width = r.real("kinetic.width");
  try {
    c.kernel = parse_kernel(r.raw("kinetic.kernel").value_or("gaussian"));
  } catch (const std::invalid_argument& e) {
    r.fail("kinetic.kernel", e.what());
  }
  c.dtau = r.real("kinetic.dtau").value_or(0.01);
  c.compare_tolerance = r.real("kinetic.tolerance").value_or(0.15);
  if (!(c.dtau > 0.0)) r.fail("kinetic.dtau", "must be > 0");
  if (c.h && !(*c.h > 0.0 && *c.h <= 1.0)) r.fail("kinetic.h", "must lie in (0, 1]");
  if (c.width && !(*c.width > 0.0)) r.fail("kinetic.width", "must be > 0");

  // [census]
  if (auto b = r.raw("census.betas")) {
    std::vector<std::string> parts;
    boost::split(parts, *b, boost::is_any_of(";"));
    for (auto& p : parts) {
      boost::trim(p);
      if (!p.empty()) c.census_betas.push_back(beta_from_text(r, "census.betas", p, c.box.d));
    }
  }
  c.census_times = r.list("census.times");
  if (auto kv = r.raw("census.k")) c.k = wave_vector(r, "census.k", r.list("census.k", *kv), c.box.d);

  // [first_iterate]
  c.times = r.list("first_iterate.times");
  c.fine_h = r.real("first_iterate.fine_h");

  // [diagrams]
  c.max_order = static_cast<int>(r.integer("diagrams.max_order").value_or(2));
  c.window = r.real("diagrams.window").value_or(0.5);

  c.output = r.raw("output.dir").value_or("");

  // Per-experiment requirements.
  const bool dynamic = experiment == "ensemble" || experiment == "compare" || experiment == "chaos";
  if ((dynamic || experiment == "wke") && !c.tau && !r.real("evolve.t_end")) {
    r.fail("evolve.tau", "required field is missing (or give evolve.t_end)");
  }
  if (experiment == "compare" && !c.tau) r.fail("evolve.tau", "compare needs a kinetic-time horizon");
  if (experiment == "wke" && !c.tau) r.fail("evolve.tau", "wke needs a kinetic-time horizon");
  if (dynamic && c.M < 2) r.fail("ensemble.M", "must be >= 2");
  if (experiment == "chaos" && c.tracked.size() < 2) r.fail("ensemble.tracked", "chaos needs at least two tracked modes");
  if (experiment == "census" && c.census_times.empty()) r.fail("census.times", "required field is missing");
  if (experiment == "first-iterate" && c.times.empty()) r.fail("first_iterate.times", "required field is missing");
  if (experiment == "diagrams" && (c.max_order < 0 || c.max_order > kCombinatoricsCap))
    r.fail("diagrams.max_order", "must lie in [0, 4]");
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment, path);
}

}  // namespace wavekin
