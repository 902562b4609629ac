#pragma once

#include <optional>
#include <vector>

#include "kaonlab/constants.hpp"

// Wigner-type inequality P(K_S, K0bar) <= P(K_S, K1) + P(K1, K0bar) and its
// time-dependent forms. Times in tau_S units.
namespace kaonlab {

struct WignerEvaluation {
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;  // lhs > rhs
  double t_a = 0.0;
  double t_b = 0.0;
  double t_c = 0.0;
  std::optional<double> h;

  double margin() const { return lhs - rhs; }
};

struct WignerT0 {
  WignerEvaluation probabilities;
  // Re(eps) > |eps|^2, the same inequality expressed through epsilon.
  bool epsilon_route_violated = false;

  bool routes_agree() const { return probabilities.violated == epsilon_route_violated; }
};

WignerT0 wigner_t0(const PhysicalConstants& constants);

// h = -P_{KS,K0bar}(NN) + P_{KS,K1}(NN) + P_{K1,K0bar}(NN) + P_{K1,K1}(NN),
// all at equal times t.
double h_correction(double t, const PhysicalConstants& constants);

enum class HTerm { include, drop };

// Y-Y probabilities at t_a = t_b = t_c = t; the rhs carries h(t) unless
// `HTerm::drop`, which reproduces the non-unitary (wrong) inequality.
WignerEvaluation wigner_equal_times(double t, const PhysicalConstants& constants,
                                    HTerm h_term = HTerm::include);

// Crossing time of the equal-times inequality, by bisection to `tol`.
// Throws MathError when the inequality holds already at t = 0.
double violation_threshold(const PhysicalConstants& constants, double tol = 1e-6);

// Generalized CHSH function in the Wigner configuration (k_n = K_S,
// k_m = K0bar, k_n' = k_m' = K1) with t_c = t_d = t_a; lhs is the
// probability-form value, rhs the local bound 1.
WignerEvaluation wigner_two_times(double t_a, double t_b, const PhysicalConstants& constants);

struct ZetaBound {
  double value = 0.0;
  // Re(eps) <= |eps|^2: the Wigner inequality holds for every zeta.
  bool vacuous = false;
};

// (Re eps - |eps|^2) / (Re eps + 4 Re^2 eps + |eps|^2) <= zeta.
ZetaBound zeta_lower_bound(const PhysicalConstants& constants);

struct RegionCell {
  double t_a = 0.0;
  double t_b = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
};

// wigner_two_times on the grid t_a = k step (<= t_a_max), t_b = j step
// (<= t_b_max), restricted to t_a <= t_b. Row-major in t_a.
std::vector<RegionCell> wigner_region_scan(double t_a_max, double t_b_max, double step,
                                           const PhysicalConstants& constants);

}  // namespace kaonlab
