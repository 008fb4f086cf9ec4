#include "wavekin/experiments.hpp"

#include "wavekin/census.hpp"
#include "wavekin/diagrams.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wavekin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kAxis[3] = {"m_x", "m_y", "m_z"};

std::ofstream open_csv(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setprecision(17);
  return os;
}

std::string tag(double L) {
  std::ostringstream os;
  os << "L" << L;
  return os.str();
}

std::vector<double> snapshot_times(const ExperimentConfig& c, const BoxSpec& box, double t_end) {
  std::vector<double> out;
  if (!c.snapshot_taus.empty()) {
    for (double s : c.snapshot_taus) out.push_back(std::min(s * box.t_kin(), t_end));
  } else if (!c.evolve.snapshot_times.empty()) {
    out = c.evolve.snapshot_times;
  } else {
    out = {0.0, t_end};
  }
  return out;
}

EvolveConfig evolve_config(const ExperimentConfig& c, const BoxSpec& box) {
  EvolveConfig e = c.evolve;
  e.t_end = end_time(c, box);
  e.snapshot_times = snapshot_times(c, box, e.t_end);
  e.validate();
  return e;
}

std::uint64_t base_seed(const ExperimentConfig& c, const RunOptions& o) { return o.seed.value_or(c.base_seed); }

WkeConfig wke_config(const ExperimentConfig& c, const KineticGrid& grid, const BoxSpec& box) {
  WkeConfig w;
  w.tau_end = c.tau.value_or(0.0);
  w.dtau = c.dtau;
  w.broadening = default_broadening(grid);
  if (c.width) w.broadening.width = *c.width;
  w.broadening.kind = c.kernel;
  w.rate = box.kinetic_rate();
  w.validate();
  return w;
}

// Steps of a trajectory closest to the requested kinetic times.
std::vector<std::size_t> steps_at(const WkeTrajectory& traj, const std::vector<double>& taus) {
  std::vector<std::size_t> out;
  if (taus.empty()) return {0, traj.tau.size() - 1};
  for (double s : taus) {
    const auto it = std::lower_bound(traj.tau.begin(), traj.tau.end(), s - 1e-12);
    out.push_back(it == traj.tau.end() ? traj.tau.size() - 1 : static_cast<std::size_t>(it - traj.tau.begin()));
  }
  return out;
}

ExperimentReport run_census(const ExperimentConfig& c, const fs::path& dir) {
  std::vector<std::vector<double>> betas = c.census_betas;
  if (betas.empty()) betas.push_back({c.box.beta.data(), c.box.beta.data() + c.box.d});
  std::vector<BoxSpec> specs;
  for (const auto& b : betas) {
    for (double L : c.L_values) specs.push_back(make_box(c.box.d, L, c.box.cutoff, c.box.gamma, b));
  }
  const auto rows = crossover_scan(specs, c.k, c.census_times);
  {
    auto os = open_csv(dir / "census.csv");
    write_census_csv(os, rows);
  }
  auto os = open_csv(dir / "crossover.csv");
  os << "beta_label,L,crossover_time\n";
  json summary = json::array();
  for (const BoxSpec& s : specs) {
    const double tc = crossover_time(rows, s.beta_label, s.L);
    os << s.beta_label << ',' << s.L << ',';
    if (std::isfinite(tc)) {
      os << tc;
    } else {
      os << "inf";
    }
    os << '\n';
    summary.push_back({{"beta_label", s.beta_label},
                       {"L", s.L},
                       {"exact_count", count_exact(s, c.k)},
                       {"crossover_time", std::isfinite(tc) ? json(tc) : json("inf")}});
  }
  ExperimentReport r;
  r.summary_json = json{{"census", summary}}.dump();
  return r;
}

ExperimentReport run_first_iterate(const ExperimentConfig& c, const fs::path& dir) {
  auto os = open_csv(dir / "first_iterate.csv");
  os << "L,tau,t,epsilon,fine_h,sum_over_eps2,integral_over_eps2,integral_over_eps2_t,collision\n";
  const double fine_h = c.fine_h.value_or(1.0 / *std::max_element(c.L_values.begin(), c.L_values.end()));
  const KineticGrid grid(c.box.d, fine_h, c.box.cutoff, c.box.beta);
  const Eigen::VectorXd n_fine = spectrum_on(c.spectrum, grid.modes());
  for (double L : c.L_values) {
    const BoxSpec box = c.box_at(L);
    const ModeSet modes(box);
    const Eigen::VectorXd n_in = spectrum_on(c.spectrum, modes);
    const double scale = L * fine_h;
    WaveVector fine = WaveVector::Zero();
    for (int j = 0; j < box.d; ++j) {
      const double v = c.k[j] / scale;
      if (std::abs(v - std::round(v)) > 1e-9) throw std::invalid_argument("first-iterate: k is not a node of the fine grid");
      fine[j] = static_cast<int>(std::lround(v));
    }
    const auto i = grid.modes().index_of(fine);
    if (i < 0) throw std::invalid_argument("first-iterate: k lies outside the cutoff");
    const double eps = box.epsilon();
    for (double tau : c.times) {
      const double t = tau * box.t_kin();
      const double sum = first_iterate_sum(modes, n_in, t, c.k);
      const double integral = first_iterate_integral(grid, n_fine, t, static_cast<std::size_t>(i), eps);
      const DeltaBroadening b{1.0 / t, c.kernel};
      const double coll = collision_point(grid, n_fine, static_cast<std::size_t>(i), b);
      os << L << ',' << tau << ',' << t << ',' << eps << ',' << fine_h << ',' << sum / (eps * eps) << ','
         << integral / (eps * eps) << ',' << integral / (eps * eps * t) << ',' << coll << '\n';
    }
  }
  return {};
}

ExperimentReport run_wke(const ExperimentConfig& c, const fs::path& dir) {
  const KineticGrid grid = c.h ? KineticGrid(c.box.d, *c.h, c.box.cutoff, c.box.beta) : KineticGrid::from_box(c.box);
  const Eigen::VectorXd n_in = spectrum_on(c.spectrum, grid.modes());
  const WkeConfig w = wke_config(c, grid, c.box);
  const WkeTrajectory traj = solve_wke(grid, n_in, w);
  {
    auto os = open_csv(dir / "wke.csv");
    write_kinetic_csv(os, grid, traj, steps_at(traj, c.snapshot_taus));
  }
  auto os = open_csv(dir / "clip.csv");
  os << "tau,clip_mass\n";
  double clipped = 0.0;
  for (std::size_t s = 0; s < traj.tau.size(); ++s) {
    os << traj.tau[s] << ',' << traj.clip_mass[s] << '\n';
    clipped += traj.clip_mass[s];
  }
  ExperimentReport r;
  r.summary_json = json{{"grid_h", grid.h()},
                        {"nodes", grid.size()},
                        {"width", w.broadening.width},
                        {"kernel", to_string(w.broadening.kind)},
                        {"stability_bound", traj.stability_bound},
                        {"total_clip_mass", clipped}}
                       .dump();
  return r;
}

ExperimentReport run_ensemble_experiment(const ExperimentConfig& c, const fs::path& dir, const RunOptions& o) {
  ExperimentReport r;
  json summary = json::array();
  for (double L : c.L_values) {
    const BoxSpec box = c.box_at(L);
    auto modes = std::make_shared<const ModeSet>(box);
    EnsembleOptions eo;
    eo.threads = o.threads;
    const auto res = run_ensemble(modes, c.spectrum, c.law, evolve_config(c, box), c.M, base_seed(c, o), eo);
    auto os = open_csv(dir / ("moments_" + tag(L) + ".csv"));
    write_moment_csv(os, *modes, res.tables);
    r.seeds.insert(r.seeds.end(), res.seeds.begin(), res.seeds.end());
    summary.push_back({{"L", L}, {"modes", modes->size()}, {"M", c.M}, {"t_end", evolve_config(c, box).t_end}});
  }
  std::sort(r.seeds.begin(), r.seeds.end());
  r.seeds.erase(std::unique(r.seeds.begin(), r.seeds.end()), r.seeds.end());
  r.summary_json = json{{"ensembles", summary}}.dump();
  return r;
}

ExperimentReport run_compare(const ExperimentConfig& c, const fs::path& dir, const RunOptions& o) {
  ExperimentReport r;
  auto detail = open_csv(dir / "compare.csv");
  detail << "L";
  for (int j = 0; j < c.box.d; ++j) detail << ',' << kAxis[j];
  detail << ",n_in,mc_mean,mc_stderr,wke,defect\n";
  auto sum = open_csv(dir / "compare_summary.csv");
  sum << "L,M,tau,peak_relative_defect,sup_defect,sup_stderr,pass\n";
  json summary = json::array();
  for (double L : c.L_values) {
    const ComparePoint p = compare_at(c, L, o);
    for (std::size_t i = 0; i < p.modes->size(); ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      detail << L;
      for (int j = 0; j < c.box.d; ++j) detail << ',' << (*p.modes)[i][j];
      detail << ',' << p.n_in[e] << ',' << p.mc_mean[e] << ',' << p.mc_stderr[e] << ',' << p.wke[e] << ','
             << std::abs(p.mc_mean[e] - p.wke[e]) << '\n';
    }
    sum << L << ',' << c.M << ',' << *c.tau << ',' << p.peak_relative_defect << ',' << p.sup_defect << ','
        << p.sup_stderr << ',' << (p.pass ? "PASS" : "FAIL") << '\n';
    r.pass = r.pass && p.pass;
    r.seeds.insert(r.seeds.end(), p.seeds.begin(), p.seeds.end());
    summary.push_back({{"L", L},
                       {"peak_relative_defect", p.peak_relative_defect},
                       {"sup_defect", p.sup_defect},
                       {"sup_stderr", p.sup_stderr},
                       {"pass", p.pass}});
  }
  std::sort(r.seeds.begin(), r.seeds.end());
  r.seeds.erase(std::unique(r.seeds.begin(), r.seeds.end()), r.seeds.end());
  r.summary_json = json{{"compare", summary}, {"verdict", r.pass ? "PASS" : "FAIL"}}.dump();
  return r;
}

ExperimentReport run_diagrams(const ExperimentConfig& c, const fs::path& dir) {
  const std::vector<Couple> regular = generate_regular(c.max_order);
  {
    std::ofstream os(dir / "couples.txt");
    for (const Couple& x : regular) write_couple_text(os, x);
  }
  {
    std::ofstream os(dir / "molecules.txt");
    for (const Couple& x : regular) write_molecule_text(os, build_molecule(x));
  }
  auto os = open_csv(dir / "diagrams.csv");
  os << "n_plus,n_minus,trees_plus,trees_minus,couples,regular\n";
  for (int order = 0; order <= c.max_order; ++order) {
    for (int np = order; np >= 0; --np) {
      const int nm = order - np;
      const auto couples = enum_couples(np, nm);
      const auto reg = std::count_if(couples.begin(), couples.end(), [](const Couple& x) { return is_regular(x); });
      os << np << ',' << nm << ',' << enum_trees(np, +1).size() << ',' << enum_trees(nm, -1).size() << ','
         << couples.size() << ',' << reg << '\n';
    }
  }
  ExperimentReport r;
  if (c.tau) {
    const ModeSet modes(c.box);
    const Eigen::VectorXd n_in = spectrum_on(c.spectrum, modes);
    const double t = diagram_time(c.box, *c.tau, c.window);
    const int N = std::min(c.max_order, kLatticeCap);
    const Eigen::VectorXd m = truncated_moment(modes, n_in, t, N);
    auto tm = open_csv(dir / "truncated_moment.csv");
    tm << "t";
    for (int j = 0; j < c.box.d; ++j) tm << ',' << kAxis[j];
    tm << ",n_in,moment\n";
    for (std::size_t i = 0; i < modes.size(); ++i) {
      tm << t;
      for (int j = 0; j < c.box.d; ++j) tm << ',' << modes[i][j];
      tm << ',' << n_in[static_cast<Eigen::Index>(i)] << ',' << m[static_cast<Eigen::Index>(i)] << '\n';
    }
  }
  r.summary_json = json{{"regular_couples", regular.size()}, {"max_order", c.max_order}}.dump();
  return r;
}

std::string pattern(const std::vector<int>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j) s += ' ';
    s += std::to_string(v[j]);
  }
  return s;
}

ExperimentReport run_chaos(const ExperimentConfig& c, const fs::path& dir, const RunOptions& o) {
  ExperimentReport r;
  auto os = open_csv(dir / "chaos.csv");
  os << "L,t,defect,stderr,max_z,p,q\n";
  for (double L : c.L_values) {
    const BoxSpec box = c.box_at(L);
    auto modes = std::make_shared<const ModeSet>(box);
    EnsembleOptions eo;
    eo.threads = o.threads;
    eo.tracked = c.tracked;
    const auto res = run_ensemble(modes, c.spectrum, c.law, evolve_config(c, box), c.M, base_seed(c, o), eo);
    for (std::size_t s = 0; s < res.tables.size(); ++s) {
      const ChaosDefect d = chaos_defect(res.tracked[s]);
      os << L << ',' << res.tables[s].t << ',' << d.defect << ',' << d.stderr_of_defect << ',' << d.max_z << ','
         << pattern(d.p) << ',' << pattern(d.q) << '\n';
    }
    r.seeds.insert(r.seeds.end(), res.seeds.begin(), res.seeds.end());
  }
  std::sort(r.seeds.begin(), r.seeds.end());
  r.seeds.erase(std::unique(r.seeds.begin(), r.seeds.end()), r.seeds.end());
  return r;
}

}  // namespace

double end_time(const ExperimentConfig& c, const BoxSpec& box) {
  return c.tau ? *c.tau * box.t_kin() : c.evolve.t_end;
}

ComparePoint compare_at(const ExperimentConfig& c, double L, const RunOptions& options) {
  if (!c.tau) throw std::invalid_argument("compare: tau is required");
  const BoxSpec box = c.box_at(L);
  ComparePoint p;
  p.L = L;
  const KineticGrid grid(box.d, 1.0 / L, box.cutoff, box.beta);
  p.modes = grid.mode_set();
  p.n_in = spectrum_on(c.spectrum, *p.modes);

  EvolveConfig e = c.evolve;
  e.t_end = end_time(c, box);
  e.snapshot_times = {e.t_end};
  e.validate();
  EnsembleOptions eo;
  eo.threads = options.threads;
  auto mc_modes = std::make_shared<const ModeSet>(box);
  const auto res = run_ensemble(mc_modes, c.spectrum, c.law, e, c.M, options.seed.value_or(c.base_seed), eo);
  p.mc_mean = res.tables.back().mean;
  p.mc_stderr = res.tables.back().stderr_of_mean;
  p.seeds = res.seeds;

  const WkeConfig w = wke_config(c, grid, box);
  p.wke = solve_wke(grid, p.n_in, w).n.back();

  Eigen::Index pk = 0;
  p.n_in.maxCoeff(&pk);
  p.peak = static_cast<std::size_t>(pk);
  p.peak_relative_defect = std::abs(p.mc_mean[pk] - p.wke[pk]) / std::abs(p.wke[pk]);
  const Eigen::VectorXd defect = (p.mc_mean - p.wke).cwiseAbs();
  Eigen::Index arg = 0;
  p.sup_defect = defect.maxCoeff(&arg);
  p.sup_stderr = p.mc_stderr[arg];
  const double tol = c.compare_tolerance * p.wke.cwiseAbs().maxCoeff();
  p.pass = ((defect - 4.0 * p.mc_stderr).array() <= tol).all();
  return p;
}

ExperimentReport run_experiment(const ExperimentConfig& c, const fs::path& dir, const RunOptions& options) {
  if (c.experiment == "census") return run_census(c, dir);
  if (c.experiment == "first-iterate") return run_first_iterate(c, dir);
  if (c.experiment == "wke") return run_wke(c, dir);
  if (c.experiment == "ensemble") return run_ensemble_experiment(c, dir, options);
  if (c.experiment == "compare") return run_compare(c, dir, options);
  if (c.experiment == "diagrams") return run_diagrams(c, dir);
  if (c.experiment == "chaos") return run_chaos(c, dir, options);
  throw std::invalid_argument("unknown experiment '" + c.experiment + "'");
}

}  // namespace wavekin
