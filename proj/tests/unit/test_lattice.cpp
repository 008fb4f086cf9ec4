#include "doctest.h"

#include "wavekin/lattice.hpp"

#include <cmath>
#include <random>

using namespace wavekin;

TEST_CASE("mode set sizes") {
  CHECK(ModeSet(make_box(1, 1, 1, 1)).size() == 3);
  CHECK(ModeSet(make_box(2, 2, 1, 1)).size() == 13);
  CHECK(ModeSet(make_box(2, 8, 0.0, 1)).size() == 1);

  // brute force over a bounding cube
  for (double L : {3.0, 5.5}) {
    for (int d = 1; d <= 3; ++d) {
      const BoxSpec s = make_box(d, L, 1.3, 1);
      std::size_t n = 0;
      const int r = static_cast<int>(std::ceil(1.3 * L)) + 1;
      for (int a = -r; a <= r; ++a)
        for (int b = (d > 1 ? -r : 0); b <= (d > 1 ? r : 0); ++b)
          for (int c = (d > 2 ? -r : 0); c <= (d > 2 ? r : 0); ++c)
            if (std::sqrt(double(a * a + b * b + c * c)) / L <= 1.3) ++n;
      CHECK(ModeSet(s).size() == n);
    }
  }
}

TEST_CASE("mode set structure") {
  const ModeSet m(make_box(2, 4, 1, 1, {1.0, std::sqrt(2.0)}));
  CHECK(m[m.zero_index()] == WaveVector::Zero());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m[m.negated(i)] == WaveVector(-m[i]));
    CHECK(m.index_of(m[i]) == static_cast<std::ptrdiff_t>(i));
    if (i > 0) {
      const auto& a = m[i - 1];
      const auto& b = m[i];
      CHECK(std::lexicographical_compare(a.data(), a.data() + 2, b.data(), b.data() + 2));
    }
  }
  CHECK(m.index_of(WaveVector(9, 0, 0)) == -1);
}

TEST_CASE("mode set memory bound") { CHECK_THROWS_AS(ModeSet(make_box(3, 40, 1, 1), 1000), std::exception); }

TEST_CASE("box validation") {
  CHECK_THROWS(make_box(4, 8, 1, 1));
  CHECK_THROWS(make_box(2, 0.5, 1, 1));
  CHECK_THROWS(make_box(2, 8, -1, 1));
  CHECK_THROWS(make_box(2, 8, 1, 1, {1.0, -1.0}));
  CHECK(make_box(2, 8, 1, 1).beta_label == "square");
  CHECK(make_box(2, 8, 1, 1, {1.0, 2.0}).beta_label == "rational");
  CHECK(make_box(2, 8, 1, 1, {1.0, std::sqrt(2.0)}).beta_label == "irrational");
  const BoxSpec s = make_box(2, 16, 1, 0.75);
  CHECK(s.epsilon() == doctest::Approx(std::pow(16.0, -0.75)));
  CHECK(s.t_kin() == doctest::Approx(std::pow(16.0, 1.5)));
  CHECK(s.kinetic_rate() == doctest::Approx(1.0));
}

TEST_CASE("omega examples") {
  CHECK(omega(make_box(3, 1, 2, 1), WaveVector(1, 0, 0)) == 1.0);
  CHECK(omega(make_box(2, 1, 2, 1, {1.0, 2.0}), WaveVector(1, 1, 0)) == 3.0);
  CHECK(omega(make_box(2, 5, 2, 1), WaveVector::Zero()) == 0.0);
}

TEST_CASE("resonance examples") {
  const BoxSpec s = make_box(2, 1, 3, 1);
  CHECK(resonance(s, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}) == 0.0);
  CHECK(resonance(s, {1, 0, 0}, {2, 0, 0}, {1, 0, 0}, {0, 0, 0}) == -2.0);
  CHECK(resonance(s, {2, 1, 0}, {0, 1, 0}, {0, 1, 0}, {2, 1, 0}) == 0.0);
  CHECK_THROWS_AS(resonance(s, {1, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}, MomentumCheck::strict), std::invalid_argument);
}

TEST_CASE("factorization, symmetry and evenness on random decorations") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(-20, 20);
  const BoxSpec sq = make_box(3, 7, 10, 1);
  const BoxSpec ir = make_box(3, 7.5, 10, 1, generic_beta(3));
  for (int n = 0; n < 20000; ++n) {
    const WaveVector k1(u(rng), u(rng), u(rng)), k3(u(rng), u(rng), u(rng)), k(u(rng), u(rng), u(rng));
    const WaveVector k2 = k1 + k3 - k;
    for (const BoxSpec* s : {&sq, &ir}) {
      const double om = resonance(*s, k1, k2, k3, k);
      const double direct = omega(*s, k1) - omega(*s, k2) + omega(*s, k3) - omega(*s, k);
      REQUIRE(std::abs(om - direct) <= 1e-9 * std::max(1.0, std::abs(om)));
      REQUIRE(resonance(*s, k3, k2, k1, k) == doctest::Approx(om));
      REQUIRE(resonance(*s, k2, k1, k, k3) == doctest::Approx(-om));
    }
    const double scaled = resonance(sq, k1, k2, k3, k) * 49.0;
    REQUIRE(std::abs(scaled - 2.0 * std::round(scaled / 2.0)) < 1e-9);
  }
}

TEST_CASE("rational numerator") {
  const BoxSpec s = make_box(2, 6, 2, 1, {1.0, 2.0});
  const auto rb = s.rational_beta();
  REQUIRE(rb.has_value());
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(-12, 12);
  for (int n = 0; n < 2000; ++n) {
    const WaveVector k1(u(rng), u(rng), 0), k3(u(rng), u(rng), 0), k(u(rng), u(rng), 0);
    const double om = resonance(s, k1, k1 + k3 - k, k3, k);
    CHECK(resonance_numerator(*rb, k1, k3, k) / (static_cast<double>(rb->denominator) * 36.0) == doctest::Approx(om));
  }
  CHECK_FALSE(make_box(2, 6, 2, 1, generic_beta(2)).rational_beta().has_value());
}
