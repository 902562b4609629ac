#include <doctest.h>

#include <cmath>
#include <random>

#include "kaonlab/errors.hpp"
#include "kaonlab/wigner.hpp"

using namespace kaonlab;

TEST_CASE("t = 0 inequality is Re eps <= |eps|^2") {
  const auto w = wigner_t0(default_constants());
  CHECK(w.probabilities.violated);
  CHECK(w.routes_agree());

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(1e-4, 1e-2);
  std::uniform_real_distribution<double> ph(0.0, 360.0);
  for (int i = 0; i < 300; ++i) {
    const auto r = wigner_t0(default_constants().with_epsilon(epsilon_from_polar(a(rng), ph(rng))));
    CHECK(r.routes_agree());
  }
  // Phase past 90 degrees: Re eps < 0, no violation.
  CHECK_FALSE(wigner_t0(default_constants().with_epsilon(epsilon_from_polar(2e-3, 120))).probabilities.violated);
}

TEST_CASE("h correction limits") {
  const auto c = default_constants();
  // At t = 0 the h term cancels the t = 0 margin exactly.
  const auto drop = wigner_equal_times(0.0, c, HTerm::drop);
  CHECK(h_correction(0.0, c) == doctest::Approx(-drop.margin()).epsilon(1e-9));
  CHECK(h_correction(0.01, c) > 0.0);
  // Both components decayed: every N,N probability is 1.
  CHECK(h_correction(3e4, c) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(h_correction(60.0, c) < 2.0);
}

TEST_CASE("equal-times violation threshold") {
  const auto c = default_constants();
  const double th = violation_threshold(c, 1e-8);
  CHECK(th == doctest::Approx(7.86e-4).epsilon(5e-3));
  CHECK(wigner_equal_times(0.5 * th, c).violated);
  CHECK_FALSE(wigner_equal_times(2.0 * th, c).violated);
  CHECK_THROWS_AS(violation_threshold(c.with_epsilon(epsilon_from_polar(2e-3, 120))), MathError);
}

TEST_CASE("two-time form") {
  const auto c = default_constants();
  CHECK(wigner_two_times(0.0, 2.0, c).violated);
  CHECK_FALSE(wigner_two_times(1e-3, 6.0, c).violated);
  CHECK_THROWS_AS(wigner_two_times(2.0, 1.0, c), MathError);
  CHECK_THROWS_AS(wigner_two_times(-1.0, 1.0, c), MathError);
}

TEST_CASE("zeta lower bound") {
  const auto b = zeta_lower_bound(default_constants());
  CHECK_FALSE(b.vacuous);
  CHECK(b.value == doctest::Approx(0.9875).epsilon(1e-3));
  CHECK(zeta_lower_bound(default_constants().with_epsilon(0.0)).vacuous);
}

TEST_CASE("region scan covers the t_a <= t_b triangle") {
  const auto c = default_constants();
  const auto cells = wigner_region_scan(0.2, 1.0, 0.1, c);
  CHECK(cells.size() == 11 + 10 + 9);
  for (const auto& cell : cells) {
    CHECK(cell.t_a <= cell.t_b + 1e-12);
    const auto e = wigner_two_times(cell.t_a, cell.t_b, c);
    CHECK(cell.lhs == e.lhs);
  }
  CHECK_THROWS_AS(wigner_region_scan(1.0, 1.0, 0.0, c), MathError);
}
