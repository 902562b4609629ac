#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kaonlab/chsh.hpp"
#include "kaonlab/errors.hpp"

using namespace kaonlab;
constexpr double pi = std::numbers::pi;

TEST_CASE("photon CHSH function") {
  CHECK(s_photon(3 * pi / 4, pi / 4, pi / 4) == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(s_photon(3 * pi / 4, pi / 2, 0) == doctest::Approx(1 + std::sqrt(2.0)));
  CHECK(s_photon(0, 0, 0) == doctest::Approx(2.0));
}

TEST_CASE("strangeness times chart") {
  const auto c = default_constants();
  const double dm = c.delta_m_unit();
  const auto t = strangeness_times(0.5, 3 * pi / 4, pi / 4, pi / 4, c);
  REQUIRE(t.has_value());
  CHECK(t->t_b == doctest::Approx(0.5 + 3 * pi / 4 / dm));
  CHECK(t->t_c == doctest::Approx(0.5 + pi / 4 / dm));
  CHECK(t->t_d == doctest::Approx(t->t_b - pi / 4 / dm));
  CHECK_FALSE(strangeness_times(0.0, 0.0, 0.0, 1.0, c).has_value());
  CHECK_THROWS_AS(s_kaon_strangeness(0.0, 0.0, 0.0, 1.0, c), MathError);
}

TEST_CASE("kaon CHSH without decays reduces to the photon function") {
  const auto c = default_constants().with_decay_mode(DecayMode::none);
  CHECK(s_kaon_strangeness(0, 3 * pi / 4, pi / 4, pi / 4, c) ==
        doctest::Approx(s_photon(3 * pi / 4, pi / 4, pi / 4)));
}

TEST_CASE("decays keep the kaon CHSH function at or below 2") {
  const auto c = default_constants().with_decay_mode(DecayMode::no_long_lived);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> t(0.0, 4.0);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi);
  int evaluated = 0;
  for (int i = 0; i < 20000; ++i) {
    if (auto s = try_s_kaon_strangeness(t(rng), ang(rng), ang(rng), ang(rng), c)) {
      CHECK(*s <= 2.0 + 1e-12);
      ++evaluated;
    }
  }
  CHECK(evaluated > 1000);
}

TEST_CASE("generalized CHSH bridges to the strangeness function") {
  const auto c = default_constants().with_epsilon(0.0).with_decay_mode(DecayMode::no_long_lived);
  const auto kb = named_state(StateKind::k0bar, c);
  const double dm = c.delta_m_unit();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double ta = u(rng), tb = u(rng), tc = u(rng), td = u(rng);
    const ChshSetting s{kb, kb, kb, kb, ta, tb, tc, td};
    const double kaon = s_kaon_strangeness(ta, dm * (tb - ta), dm * (tc - ta), dm * (tb - td), c);
    CHECK(s_generalized_correlation_form(s, c) == doctest::Approx(kaon).epsilon(1e-10));
    CHECK(s_generalized_correlation_form(s, c) ==
          doctest::Approx(2 * s_generalized(s, c)).epsilon(1e-12));
  }
}

TEST_CASE("expectation value from outcome table") {
  const auto c = default_constants().with_epsilon(0.0);
  const auto k0 = named_state(StateKind::k0, c);
  CHECK(expectation_qm(k0, 0.0, k0, 0.0, c) == doctest::Approx(-1.0));
}

TEST_CASE("maximizer on a smooth objective") {
  const Objective f = [](std::span<const double> x) -> std::optional<double> {
    return -(x[0] - 0.3) * (x[0] - 0.3) - 2 * (x[1] + 0.7) * (x[1] + 0.7);
  };
  const std::vector<Interval> box{{-1, 1}, {-1, 1}};
  const auto r = maximize(f, box);
  CHECK(r.best_value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r.argmax[0] == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(r.argmax[1] == doctest::Approx(-0.7).epsilon(1e-5));
  CHECK(r.best_value >= r.best_grid_value);

  const auto again = maximize(f, box);
  CHECK(again.best_value == r.best_value);
  CHECK(again.argmax == r.argmax);
}

TEST_CASE("maximizer respects the box and partial domains") {
  const Objective f = [](std::span<const double> x) -> std::optional<double> {
    if (x[0] < 0.2) return std::nullopt;
    return x[0];
  };
  const std::vector<Interval> box{{0, 1}, {0.5, 0.5}};
  const auto r = maximize(f, box);
  CHECK(r.best_value == doctest::Approx(1.0));
  CHECK(r.argmax[1] == 0.5);

  MaximizeOptions coarse;
  coarse.grid_steps = 4;
  CHECK_THROWS_AS(maximize(f, box, coarse), MathError);
  const std::vector<Interval> bad{{1, 0}};
  CHECK_THROWS_AS(maximize(f, bad), MathError);
  CHECK_THROWS_AS(maximize(f, std::span<const Interval>{}), MathError);
}

TEST_CASE("function names round trip") {
  for (auto f : {ChshFunction::photon, ChshFunction::kaon_strangeness,
                 ChshFunction::generalized_restricted}) {
    CHECK(parse_chsh_function(to_string(f)) == f);
    CHECK_FALSE(default_bounds(f).empty());
  }
}
