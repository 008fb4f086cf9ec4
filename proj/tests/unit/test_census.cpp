#include "doctest.h"

#include "wavekin/census.hpp"

#include <cmath>
#include <sstream>

using namespace wavekin;

namespace {

struct Brute {
  std::int64_t exact = 0;
  std::int64_t window = 0;
  std::int64_t admissible = 0;
};

// Direct enumeration; exact zeros by the per-coordinate rule for irrational
// beta and by integer arithmetic (beta integral here) otherwise.
Brute brute(const BoxSpec& s, const WaveVector& k, double delta) {
  const ModeSet m(s);
  const bool irrational = s.beta_label == "irrational";
  Brute b;
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t c = 0; c < m.size(); ++c) {
      const WaveVector k2 = m[a] + m[c] - k;
      if (!m.contains(k2)) continue;
      ++b.admissible;
      const WaveVector p = m[a] - k, q = m[c] - k;
      bool zero = true;
      long long integer = 0;
      for (int j = 0; j < s.d; ++j) {
        if (p[j] * q[j] != 0) zero = false;
        integer += static_cast<long long>(std::llround(s.beta[j])) * p[j] * q[j];
      }
      if (!irrational) zero = integer == 0;
      const double om = omega(s, m[a]) - omega(s, k2) + omega(s, m[c]) - omega(s, k);
      if (zero) {
        ++b.exact;
        ++b.window;
      } else if (std::abs(om) <= delta) {
        ++b.window;
      }
    }
  }
  return b;
}

}  // namespace

TEST_CASE("toy instance") {
  const BoxSpec s = make_box(1, 1, 1, 1);
  CHECK(count_window({s, WaveVector::Zero(), 0.5}) == 5);
  CHECK(count_exact(s, WaveVector::Zero()) == 5);
  CHECK(count_window({s, WaveVector::Zero(), 100.0}) == 7);
  CHECK(count_admissible(s, WaveVector::Zero()) == 7);
  CHECK(count_quasi({s, WaveVector::Zero(), 100.0}) == 2);
  CHECK(count_window({make_box(1, 1, 0.5, 1), WaveVector(3, 0, 0), 1.0}) == 0);
}

TEST_CASE("counts agree with brute force") {
  for (const BoxSpec& s : {make_box(2, 4, 1, 1), make_box(2, 5, 1, 1, {1.0, std::sqrt(2.0)}),
                           make_box(2, 4, 1, 1, {1.0, 2.0}), make_box(3, 2.5, 1, 1)}) {
    for (const WaveVector& k : {WaveVector::Zero().eval(), WaveVector(1, 0, 0), WaveVector(1, -2, 0)}) {
      if (!ModeSet(s).contains(k)) continue;
      for (double delta : {0.0, 0.07, 0.3, 1.0}) {
        const Brute b = brute(s, k, delta);
        CAPTURE(s.beta_label);
        CAPTURE(delta);
        CHECK(count_window({s, k, delta}) == b.window);
        CHECK(count_exact(s, k) == b.exact);
        CHECK(count_quasi({s, k, delta}) == b.window - b.exact);
        CHECK(count_admissible(s, k) == b.admissible);
      }
    }
  }
}

TEST_CASE("monotone in delta and cutoff") {
  const WaveVector k = WaveVector::Zero();
  for (const auto& beta : {std::vector<double>{1.0, 1.0}, generic_beta(2)}) {
    std::int64_t prev = -1;
    for (double delta : {0.0, 0.01, 0.05, 0.2, 1.0, 4.0}) {
      const auto n = count_window({make_box(2, 6, 1, 1, beta), k, delta});
      CHECK(n >= prev);
      prev = n;
    }
    prev = -1;
    for (double cutoff : {0.5, 0.75, 1.0, 1.2}) {
      const auto n = count_window({make_box(2, 6, cutoff, 1, beta), k, 0.1});
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("degenerate lower bound and square beats irrational") {
  for (double L : {4.0, 8.0}) {
    const BoxSpec sq = make_box(2, L, 1, 1);
    const BoxSpec ir = make_box(2, L, 1, 1, {1.0, std::sqrt(2.0)});
    const auto n = static_cast<std::int64_t>(ModeSet(sq).size());
    CHECK(count_exact(sq, WaveVector::Zero()) >= 2 * n - 1);
    CHECK(count_exact(ir, WaveVector::Zero()) >= 2 * n - 1);
    CHECK(count_exact(ir, WaveVector::Zero()) < count_exact(sq, WaveVector::Zero()));
    CHECK(count_window({sq, WaveVector::Zero(), 0.0}) == count_exact(sq, WaveVector::Zero()));
  }
}

TEST_CASE("square symmetry about k") {
  const BoxSpec s = make_box(2, 6, 1, 1);
  const WaveVector k(1, 2, 0);
  // Swapping coordinates maps the ball to itself, so counts are symmetric for k
  // on the diagonal images.
  CHECK(count_window({s, k, 0.3}) == count_window({s, WaveVector(2, 1, 0), 0.3}));
  CHECK(count_window({s, k, 0.3}) == count_window({s, WaveVector(-1, 2, 0), 0.3}));
  CHECK(count_window({s, k, 0.3}) == count_window({s, WaveVector(1, -2, 0), 0.3}));
}

TEST_CASE("budget guard reports cost") {
  CensusBudget tiny{100};
  try {
    count_exact(make_box(2, 8, 1, 1), WaveVector::Zero(), tiny);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    CHECK(e.estimated_cost() > 100);
  }
}

TEST_CASE("window volume") {
  const BoxSpec s = make_box(1, 1, 1, 1);
  // d = 1, k = 0: Omega = -2 k1 k3 on [-1,1]^2 with k1 + k3 in [-1,1].
  // Area with |k1 + k3| <= 1 is 3; the window is the part with 2|k1 k3| <= delta.
  CHECK(window_volume(s, RealVector::Zero(), 100.0, 200000) == doctest::Approx(3.0).epsilon(0.01));
  const double v1 = window_volume(s, RealVector::Zero(), 0.1, 200000);
  const double v2 = window_volume(s, RealVector::Zero(), 0.2, 200000);
  CHECK(v1 < v2);
  CHECK(v2 < 3.0);
}

TEST_CASE("crossover scan rows and csv") {
  std::vector<BoxSpec> specs{make_box(2, 4, 1, 1), make_box(2, 4, 1, 1, {1.0, std::sqrt(2.0)})};
  const auto rows = crossover_scan(specs, WaveVector::Zero(), {0.5, 2.0, 8.0, 32.0}, {{}, 20000});
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 1; i < 4; ++i) CHECK(rows[i].quasi_count <= rows[i - 1].quasi_count);
  for (const auto& r : rows) CHECK(r.delta == doctest::Approx(1.0 / r.t));
  std::ostringstream os;
  write_census_csv(os, rows);
  CHECK(os.str().rfind("beta_label,d,L,t,delta,quasi_count,exact_count,volume_prediction\n", 0) == 0);
  CHECK(crossover_time(rows, "square", 4.0) > 0.0);
}
