#include "kaonlab/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "kaonlab/chsh.hpp"
#include "kaonlab/errors.hpp"
#include "kaonlab/evolution.hpp"
#include "kaonlab/states.hpp"

namespace kaonlab {

namespace {

struct WignerStates {
  QuasiSpinState ks;
  QuasiSpinState k0bar;
  QuasiSpinState k1;

  explicit WignerStates(const PhysicalConstants& c)
      : ks(named_state(StateKind::ks, c)),
        k0bar(named_state(StateKind::k0bar, c)),
        k1(named_state(StateKind::k1, c)) {}
};

void require_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw MathError(std::string(what) + ": time must be finite and non-negative");
  }
}

}  // namespace

WignerT0 wigner_t0(const PhysicalConstants& constants) {
  WignerT0 out;
  out.probabilities = wigner_equal_times(0.0, constants, HTerm::drop);
  const auto eps = constants.epsilon();
  out.epsilon_route_violated = eps.real() > std::norm(eps);
  return out;
}

double h_correction(double t, const PhysicalConstants& constants) {
  require_time(t, "h_correction");
  const WignerStates s(constants);
  const auto nn = [&](const QuasiSpinState& l, const QuasiSpinState& r) {
    return joint_outcome_table(l, t, r, t, constants).p_nn;
  };
  return -nn(s.ks, s.k0bar) + nn(s.ks, s.k1) + nn(s.k1, s.k0bar) + nn(s.k1, s.k1);
}

WignerEvaluation wigner_equal_times(double t, const PhysicalConstants& constants,
                                    HTerm h_term) {
  require_time(t, "wigner_equal_times");
  const WignerStates s(constants);
  const auto yy = [&](const QuasiSpinState& l, const QuasiSpinState& r) {
    return joint_outcome_table(l, t, r, t, constants).p_yy;
  };
  WignerEvaluation e;
  e.t_a = e.t_b = e.t_c = t;
  e.lhs = yy(s.ks, s.k0bar);
  e.rhs = yy(s.ks, s.k1) + yy(s.k1, s.k0bar);
  if (h_term == HTerm::include) {
    e.h = h_correction(t, constants);
    e.rhs += *e.h;
  }
  e.violated = e.lhs > e.rhs;
  return e;
}

double violation_threshold(const PhysicalConstants& constants, double tol) {
  if (!(tol > 0.0)) throw MathError("violation_threshold: tolerance must be positive");
  const auto margin = [&](double t) { return wigner_equal_times(t, constants).margin(); };
  if (!(margin(0.0) > 0.0)) {
    throw MathError("violation_threshold: no violation anywhere (inequality holds at t = 0)");
  }
  double lo = 0.0;
  double hi = 1e-6;
  while (margin(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 100.0) throw MathError("violation_threshold: no sign change up to 100 tau_S");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

WignerEvaluation wigner_two_times(double t_a, double t_b, const PhysicalConstants& constants) {
  require_time(t_a, "wigner_two_times");
  require_time(t_b, "wigner_two_times");
  if (t_a > t_b) throw MathError("wigner_two_times: requires t_a <= t_b");
  const WignerStates s(constants);
  WignerEvaluation e;
  e.t_a = t_a;
  e.t_b = t_b;
  e.t_c = t_a;
  e.lhs = s_generalized(ChshSetting{s.ks, s.k0bar, s.k1, s.k1, t_a, t_b, t_a, t_a}, constants);
  e.rhs = kLocalBoundProbability;
  e.violated = e.lhs > e.rhs;
  return e;
}

ZetaBound zeta_lower_bound(const PhysicalConstants& constants) {
  const auto eps = constants.epsilon();
  const double re = eps.real();
  const double abs2 = std::norm(eps);
  ZetaBound b;
  b.vacuous = !(re > abs2);
  b.value = (re - abs2) / (re + 4.0 * re * re + abs2);
  return b;
}

std::vector<RegionCell> wigner_region_scan(double t_a_max, double t_b_max, double step,
                                           const PhysicalConstants& constants) {
  if (!(step > 0.0) || !(t_a_max >= 0.0) || !(t_b_max >= 0.0)) {
    throw MathError("wigner_region_scan: need step > 0 and non-negative ranges");
  }
  const int na = int(std::floor(t_a_max / step + 1e-9)) + 1;
  const int nb = int(std::floor(t_b_max / step + 1e-9)) + 1;
  std::vector<RegionCell> cells;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      if (j >= i) cells.push_back({i * step, j * step, 0.0, 0.0, false});
    }
  }
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), unsigned(cells.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < cells.size(); k += workers) {
          const auto e = wigner_two_times(cells[k].t_a, cells[k].t_b, constants);
          cells[k].lhs = e.lhs;
          cells[k].rhs = e.rhs;
          cells[k].violated = e.violated;
        }
      });
    }
  }
  return cells;
}

}  // namespace kaonlab
