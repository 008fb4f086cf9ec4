#include "doctest.h"

#include "wavekin/fields.hpp"
#include "wavekin/kinetic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace wavekin;

namespace {

// Straight quadruple loop over the grid with Omega from the dispersion relation.
Eigen::VectorXd brute_raw(const KineticGrid& g, const Eigen::VectorXd& phi, const DeltaBroadening& b) {
  const ModeSet& m = g.modes();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(phi.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t i1 = 0; i1 < m.size(); ++i1)
      for (std::size_t i3 = 0; i3 < m.size(); ++i3) {
        const auto i2 = m.index_of(m[i1] + m[i3] - m[i]);
        if (i2 < 0) continue;
        const double om = g.omega()[Eigen::Index(i1)] - g.omega()[i2] + g.omega()[Eigen::Index(i3)] - g.omega()[Eigen::Index(i)];
        const double p = phi[Eigen::Index(i)], p1 = phi[Eigen::Index(i1)], p2 = phi[i2], p3 = phi[Eigen::Index(i3)];
        out[Eigen::Index(i)] += b(om) * (p1 * p2 * p3 - p * p2 * p3 + p * p1 * p3 - p * p1 * p2);
      }
  return 4.0 * std::numbers::pi * g.cell() * g.cell() * out;
}

Eigen::VectorXd random_phi(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("grid basics") {
  const KineticGrid g(2, 0.25, 1.0, RealVector(1, 1, 0));
  CHECK(g.size() == ModeSet(make_box(2, 4, 1, 1)).size());
  CHECK(g.cell() == doctest::Approx(0.0625));
  CHECK(g.default_width() == doctest::Approx(2.0 * g.frequency_spacing()));
  const ModeSet& m = g.modes();
  for (std::size_t i = 0; i < m.size(); i += 3)
    for (std::size_t i1 = 0; i1 < m.size(); ++i1)
      for (std::size_t i3 = 0; i3 < m.size(); i3 += 2) CHECK(g.combine(i1, i3, i) == m.index_of(m[i1] + m[i3] - m[i]));
  CHECK_THROWS(KineticGrid(2, 0.0, 1.0, RealVector(1, 1, 0)));
}

TEST_CASE("kernels integrate to one") {
  for (KernelKind k : {KernelKind::gaussian, KernelKind::box}) {
    const DeltaBroadening b{0.3, k};
    double s = 0.0;
    const double dx = 1e-4;
    for (double x = -5.0; x <= 5.0; x += dx) s += b(x) * dx;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
  }
  CHECK_THROWS(DeltaBroadening{0.0, KernelKind::box}.validate());
  CHECK(parse_kernel("box") == KernelKind::box);
  CHECK_THROWS(parse_kernel("lorentz"));
}

TEST_CASE("collision matches brute force") {
  for (const RealVector& beta : {RealVector(1, 1, 0), RealVector(1, std::sqrt(2.0), 0)}) {
    const KineticGrid g(2, 1.0 / 3.0, 1.0, beta);
    const Eigen::VectorXd phi = random_phi(g.size(), 4);
    for (KernelKind k : {KernelKind::gaussian, KernelKind::box}) {
      const DeltaBroadening b{0.4, k};
      const auto parts = collision_parts(g, phi, b);
      const Eigen::VectorXd ref = brute_raw(g, phi, b);
      CHECK((parts.raw - ref).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
      for (std::size_t i = 0; i < g.size(); i += 5) CHECK(collision_point(g, phi, i, b) == doctest::Approx(ref[Eigen::Index(i)]));
    }
  }
}

TEST_CASE("equilibria") {
  const KineticGrid g(2, 0.2, 1.0, RealVector(1, 1, 0));
  const DeltaBroadening b = default_broadening(g);
  for (double c : {0.0, 0.3, 1.7}) {
    const Eigen::VectorXd out = collision(g, Eigen::VectorXd::Constant(Eigen::Index(g.size()), c), b);
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mass and energy conservation") {
  const KineticGrid g(2, 0.2, 1.0, RealVector(1, std::sqrt(2.0), 0));
  const DeltaBroadening b = default_broadening(g);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const Eigen::VectorXd phi = random_phi(g.size(), s);
    const Eigen::VectorXd c = collision(g, phi, b);
    const double scale = c.cwiseAbs().sum() * g.cell();
    const double wscale = c.cwiseAbs().dot(g.omega()) * g.cell();
    CHECK(std::abs(c.sum() * g.cell()) <= 1e-12 * scale);
    CHECK(std::abs(c.dot(g.omega()) * g.cell()) <= 1e-12 * wscale);
  }
}

TEST_CASE("wke trivial trajectories and Taylor consistency") {
  const KineticGrid g(2, 0.25, 1.0, RealVector(1, 1, 0));
  WkeConfig cfg;
  cfg.tau_end = 0.2;
  cfg.dtau = 0.05;
  cfg.broadening = default_broadening(g);
  const auto c = solve_wke(g, Eigen::VectorXd::Constant(Eigen::Index(g.size()), 0.8), cfg);
  CHECK(c.n.size() == 5);
  CHECK((c.n.back().array() == 0.8).all());
  const auto z = solve_wke(g, Eigen::VectorXd::Zero(Eigen::Index(g.size())), cfg);
  CHECK(z.n.back().cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd n0 = spectrum_on(gaussian_bump(1, 0.5), g.modes());
  const Eigen::VectorXd c0 = collision(g, n0, cfg.broadening);
  double prev = 0.0;
  for (double tau : {0.04, 0.02, 0.01}) {
    WkeConfig t = cfg;
    t.tau_end = tau;
    t.dtau = tau / 4;
    const auto tr = solve_wke(g, n0, t);
    const double defect = (tr.n.back() - n0 - tau * c0).cwiseAbs().maxCoeff();
    if (prev > 0.0) CHECK(prev / defect == doctest::Approx(4.0).epsilon(0.1));
    prev = defect;
  }
}

TEST_CASE("positivity below the stability bound") {
  const KineticGrid g(2, 0.2, 1.0, RealVector(1, 1, 0));
  const Eigen::VectorXd n0 = spectrum_on(gaussian_bump(1, 0.5), g.modes());
  WkeConfig cfg;
  cfg.tau_end = 0.5;
  cfg.dtau = 0.01;
  cfg.broadening = default_broadening(g);
  const auto tr = solve_wke(g, n0, cfg);
  CHECK(cfg.dtau < tr.stability_bound);
  for (std::size_t s = 0; s < tr.n.size(); ++s) {
    CHECK(tr.clip_mass[s] == 0.0);
    CHECK(tr.n[s].minCoeff() >= 0.0);
  }
  const double m0 = n0.sum(), e0 = n0.dot(g.omega());
  CHECK(tr.n.back().sum() == doctest::Approx(m0).epsilon(1e-10));
  CHECK(tr.n.back().dot(g.omega()) == doctest::Approx(e0).epsilon(1e-10));
}

TEST_CASE("blow-up aborts with the step") {
  const KineticGrid g(2, 0.25, 1.0, RealVector(1, 1, 0));
  WkeConfig cfg;
  cfg.tau_end = 50.0;
  cfg.dtau = 5.0;
  cfg.blowup_factor = 1.5;
  cfg.broadening = default_broadening(g);
  const Eigen::VectorXd n0 = spectrum_on(gaussian_bump(10, 0.4), g.modes());
  CHECK_THROWS_AS(solve_wke(g, n0, cfg), KineticError);
}

TEST_CASE("duhamel kernel") {
  for (double om : {0.0, 1e-9, 1e-5, 0.3, 2.0, -4.0}) {
    for (double t : {0.5, 3.0, 40.0}) {
      const double x = 0.5 * om * t;
      const double ref = std::abs(om * t) < 1e-2 ? t * t * (1.0 - x * x / 3.0 + 2.0 * x * x * x * x / 45.0)
                                                 : 2.0 * (1.0 - std::cos(om * t)) / (om * om);
      CHECK(duhamel_square(om, t) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("first iterate sum") {
  const BoxSpec s = make_box(2, 4, 1, 0.5);
  const ModeSet m(s);
  const auto n0 = spectrum_on(gaussian_bump(1, 0.5), m);
  CHECK(first_iterate_sum(m, Eigen::VectorXd::Zero(n0.size()), 2.0, WaveVector::Zero()) == 0.0);
  // Direct double loop with the kernel written out.
  for (const WaveVector& k : {WaveVector::Zero().eval(), WaveVector(1, 2, 0)}) {
    const double t = 3.0;
    double acc = 0.0;
    const double p = n0[m.index_of(k)];
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t c = 0; c < m.size(); ++c) {
        const auto b = m.index_of(m[a] + m[c] - k);
        if (b < 0) continue;
        const double om = omega(s, m[a]) - omega(s, m[b]) + omega(s, m[c]) - omega(s, k);
        const double I = om == 0.0 ? t : 2.0 * std::sin(om * t / 2) / om;
        acc += I * I * bracket(p, n0[Eigen::Index(a)], n0[b], n0[Eigen::Index(c)]);
      }
    const double ref = 2.0 * s.epsilon() * s.epsilon() * std::pow(4.0, -4) * acc;
    CHECK(first_iterate_sum(m, n0, t, k) == doctest::Approx(ref).epsilon(1e-10));
  }
  CHECK_THROWS_AS(first_iterate_sum(m, n0, 1.0, WaveVector::Zero(), {10}), BudgetError);
  // Support far from k: no admissible triple touches it.
  auto narrow = custom_table({{0.0, 1.0}, {0.2, 0.0}, {3.0, 0.0}});
  const auto nn = spectrum_on(narrow, m);
  CHECK(first_iterate_sum(m, nn, 1.0, WaveVector(4, 0, 0)) == 0.0);
}

TEST_CASE("first iterate integral") {
  const KineticGrid g(2, 0.25, 1.0, RealVector(1, 1, 0));
  CHECK(first_iterate_integral(g, Eigen::VectorXd::Zero(Eigen::Index(g.size())), 2.0, 0, 0.1) == 0.0);
  // On the grid h = 1/L it coincides with the lattice sum.
  const ModeSet m(make_box(2, 4, 1, 0.5));
  const auto n0 = spectrum_on(gaussian_bump(1, 0.5), m);
  const double eps = m.spec().epsilon();
  const auto i = static_cast<std::size_t>(g.modes().index_of(WaveVector(1, 1, 0)));
  CHECK(first_iterate_integral(g, n0, 5.0, i, eps) == doctest::Approx(first_iterate_sum(m, n0, 5.0, {1, 1, 0})));
}

TEST_CASE("collision at the origin approaches the continuum value") {
  // At k = 0 on the square torus the resonant set is k1 . k3 = 0, and for a
  // gaussian n the bracket reduces to n1 n3 (1 - n1)(1 - n3).
  using boost::math::quadrature::gauss_kronrod;
  const auto g = [](double x) {
    const double n = std::exp(-4.0 * x * x);
    return n * (1.0 - n);
  };
  const double exact = 4.0 * std::numbers::pi * std::numbers::pi *
                       gauss_kronrod<double, 31>::integrate(
                           [&](double r) {
                             const double s = std::sqrt(std::max(1.0 - r * r, 0.0));
                             return g(r) * gauss_kronrod<double, 31>::integrate(g, -s, s, 10, 1e-13);
                           },
                           0.0, 1.0, 10, 1e-12);

  const KineticGrid grid(2, 1.0 / 64.0, 1.0, RealVector(1.0, 1.0, 0.0));
  const Eigen::VectorXd n = spectrum_on(gaussian_bump(1.0, 0.5), grid.modes());
  DeltaBroadening wide;
  wide.width = 1.0 / 20.0;
  DeltaBroadening narrow;
  narrow.width = 1.0 / 40.0;
  const std::size_t o = grid.modes().zero_index();
  const double extrapolated =
      (4.0 * collision_point(grid, n, o, narrow) - collision_point(grid, n, o, wide)) / 3.0;
  CHECK(extrapolated == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("hierarchy residual") {
  const KineticGrid g(2, 0.25, 1.0, RealVector(1, 1, 0));
  WkeConfig cfg;
  cfg.tau_end = 0.1;
  cfg.dtau = 0.01;
  cfg.broadening = default_broadening(g);
  const auto eq = solve_wke(g, Eigen::VectorXd::Constant(Eigen::Index(g.size()), 0.5), cfg);
  const auto r0 = hierarchy_residual(g, eq, cfg, {3, 7}, 5);
  CHECK(r0.residual < 1e-12);

  const Eigen::VectorXd n0 = spectrum_on(gaussian_bump(1, 0.5), g.modes());
  const auto tr = solve_wke(g, n0, cfg);
  const auto r1 = hierarchy_residual(g, tr, cfg, {g.modes().zero_index()}, 5);
  const double c = collision(g, tr.n[5], cfg.broadening)[Eigen::Index(g.modes().zero_index())];
  CHECK(r1.rhs == doctest::Approx(c));
  CHECK(r1.residual <= 10.0 * r1.discretization_scale + 1e-14);
  CHECK_THROWS(hierarchy_residual(g, tr, cfg, {0}, 1));
  CHECK_THROWS(hierarchy_residual(g, tr, cfg, {0, 1, 2, 3}, 5));
}

TEST_CASE("kinetic csv") {
  const KineticGrid g(1, 0.5, 1.0, RealVector(1, 0, 0));
  WkeConfig cfg;
  cfg.tau_end = 0.1;
  cfg.dtau = 0.05;
  const auto tr = solve_wke(g, Eigen::VectorXd::Constant(Eigen::Index(g.size()), 1.0), cfg);
  std::ostringstream os;
  write_kinetic_csv(os, g, tr, {0, 2});
  const std::string text = os.str();
  CHECK(text.rfind("tau,k_x,n\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * std::ptrdiff_t(g.size()));
}
