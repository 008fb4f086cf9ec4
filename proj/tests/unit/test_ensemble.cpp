#include "doctest.h"

#include "wavekin/ensemble.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace wavekin;

namespace {

std::vector<WaveField> draws(std::shared_ptr<const ModeSet> m, const SpectrumFamily& f, NoiseLaw law, int M) {
  std::vector<WaveField> out;
  for (int s = 0; s < M; ++s) out.push_back(sample_field(m, f, law, static_cast<std::uint64_t>(1000 + s)));
  return out;
}

}  // namespace

TEST_CASE("accumulator merge is partition independent") {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd scale = Eigen::VectorXd::Constant(4, 1.0);
  std::vector<Eigen::VectorXd> xs;
  for (int i = 0; i < 999; ++i) {
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = e(rng) * std::pow(10.0, j - 1);
    xs.push_back(x);
  }
  MomentAccumulator whole(scale);
  for (const auto& x : xs) whole.add(x);
  for (std::size_t parts : {2u, 3u, 7u, 50u}) {
    std::vector<MomentAccumulator> acc(parts, MomentAccumulator(scale));
    for (std::size_t i = 0; i < xs.size(); ++i) acc[(i * 7919) % parts].add(xs[i]);
    MomentAccumulator merged(scale);
    for (std::size_t p = parts; p-- > 0;) merged.merge(acc[p]);
    CHECK(merged.count() == whole.count());
    CHECK(merged.mean() == whole.mean());
    CHECK(merged.stderr_of_mean() == whole.stderr_of_mean());
  }
  Eigen::VectorXd plain = Eigen::VectorXd::Zero(4);
  for (const auto& x : xs) plain += x;
  CHECK((whole.mean() - plain / 999.0).cwiseAbs().maxCoeff() < 1e-12 * plain.maxCoeff());
  CHECK_THROWS(whole.add(Eigen::VectorXd::Constant(4, 1e30)));
}

TEST_CASE("t = 0 moments and csv") {
  auto m = build_lattice(make_box(2, 3, 1, 1));
  const auto f = gaussian_bump(1, 0.6);
  EvolveConfig cfg;
  cfg.t_end = 0.5;
  cfg.snapshot_times = {0.0, 0.5};
  const auto r = run_ensemble(m, f, NoiseLaw::gaussian, cfg, 4000, 7);
  REQUIRE(r.tables.size() == 2);
  const auto n = spectrum_on(f, *m);
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    CHECK(std::abs(r.tables[0].mean[i] - n[i]) <= 4.0 * r.tables[0].stderr_of_mean[i]);
    CHECK(r.tables[0].stderr_of_mean[i] >= 0.0);
  }
  CHECK(r.seeds.front() == 7);
  CHECK(r.seeds.back() == 7 + 3999);
  std::ostringstream os;
  write_moment_csv(os, *m, r.tables);
  CHECK(os.str().rfind("t,m_x,m_y,mean,stderr,M\n", 0) == 0);
}

TEST_CASE("no coupling leaves moduli untouched") {
  BoxSpec s = make_box(2, 4, 1, 1);
  s.coupling = 0.0;
  auto m = build_lattice(s);
  EvolveConfig cfg;
  cfg.t_end = 3.0;
  cfg.snapshot_times = {0.0, 3.0};
  const auto r = run_ensemble(m, gaussian_bump(1, 0.6), NoiseLaw::gaussian, cfg, 50, 1);
  CHECK((r.tables[1].mean - r.tables[0].mean).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("ensemble is deterministic across thread counts") {
  auto m = build_lattice(make_box(2, 3, 1, 0.5));
  EvolveConfig cfg;
  cfg.t_end = 2.0;
  cfg.snapshot_times = {2.0};
  EnsembleOptions one, many;
  one.threads = 1;
  many.threads = 3;
  const auto a = run_ensemble(m, gaussian_bump(2, 0.6), NoiseLaw::gaussian, cfg, 30, 5, one);
  const auto b = run_ensemble(m, gaussian_bump(2, 0.6), NoiseLaw::gaussian, cfg, 30, 5, many);
  CHECK(a.tables[0].mean == b.tables[0].mean);
  CHECK(a.tables[0].stderr_of_mean == b.tables[0].stderr_of_mean);
}

TEST_CASE("standard error scales as one over root M") {
  auto m = build_lattice(make_box(1, 3, 1, 1));
  EvolveConfig cfg;
  cfg.t_end = 0.0;
  cfg.snapshot_times = {0.0};
  const auto a = run_ensemble(m, gaussian_bump(1, 1), NoiseLaw::gaussian, cfg, 2000, 1);
  const auto b = run_ensemble(m, gaussian_bump(1, 1), NoiseLaw::gaussian, cfg, 8000, 1);
  const double ratio = a.tables[0].stderr_of_mean.mean() / b.tables[0].stderr_of_mean.mean();
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("joint moments at t = 0") {
  auto m = build_lattice(make_box(2, 3, 1, 1));
  const auto f = gaussian_bump(1, 0.8);
  const auto n = spectrum_on(f, *m);
  const WaveVector k1(1, 0, 0), k2(0, 1, 0);
  const double n1 = n[m->index_of(k1)];
  const double n2 = n[m->index_of(k2)];
  const auto g = draws(m, f, NoiseLaw::gaussian, 6000);
  const Estimate e11 = joint_moment(g, {{k1}, {1}, {1}});
  CHECK(std::abs(e11.mean - n1) <= 4 * e11.stderr_of_mean);
  const Estimate cross = joint_moment(g, {{k1, k2}, {1, 0}, {0, 1}});
  CHECK(std::abs(cross.mean) <= 4 * cross.stderr_of_mean);
  const Estimate rot = joint_moment(g, {{k1, k2}, {2, 0}, {0, 1}});
  CHECK(std::abs(rot.mean) <= 4 * rot.stderr_of_mean);
  const Estimate prod = joint_moment(g, {{k1, k2}, {1, 1}, {1, 1}});
  CHECK(std::abs(prod.mean - n1 * n2) <= 4 * prod.stderr_of_mean);

  const auto u = draws(m, f, NoiseLaw::uniform_phase, 200);
  const Estimate e22 = joint_moment(u, {{k1}, {2}, {2}});
  CHECK(std::abs(e22.mean - n1 * n1) < 1e-12);
  CHECK_THROWS(joint_moment(g, {{k1, k1}, {1, 0}, {0, 1}}));
}

TEST_CASE("chaos defect at t = 0") {
  auto m = build_lattice(make_box(2, 3, 1, 1));
  const auto g = draws(m, gaussian_bump(1, 0.8), NoiseLaw::gaussian, 5000);
  const std::vector<WaveVector> ks{{1, 0, 0}, {0, 1, 0}, {-1, 1, 0}};
  const ChaosDefect d = chaos_defect(g, ks);
  CHECK(d.defect <= 4.0 * d.stderr_of_defect);
  int order = 0;
  for (std::size_t j = 0; j < d.p.size(); ++j) order += d.p[j] + d.q[j];
  CHECK(order >= 1);
  CHECK(order <= 4);
  CHECK_THROWS(chaos_defect(g, {ks[0]}));

  // Perfectly correlated modes are flagged.
  Eigen::MatrixXcd x(4000, 2);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = Complex(z(rng), z(rng)) / std::sqrt(2.0);
    x(i, 1) = x(i, 0);
  }
  const ChaosDefect bad = chaos_defect(x);
  CHECK(bad.defect > 10 * bad.stderr_of_defect);
}

TEST_CASE("argument checks") {
  auto m = build_lattice(make_box(1, 3, 1, 1));
  EvolveConfig cfg;
  cfg.t_end = 1.0;
  cfg.snapshot_times = {1.0};
  CHECK_THROWS(run_ensemble(m, gaussian_bump(1, 1), NoiseLaw::gaussian, cfg, 1, 1));
  EnsembleOptions o;
  o.tracked = {WaveVector(9, 0, 0)};
  CHECK_THROWS(run_ensemble(m, gaussian_bump(1, 1), NoiseLaw::gaussian, cfg, 4, 1, o));
}
