#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "kaonlab/constants.hpp"
#include "kaonlab/evolution.hpp"
#include "kaonlab/states.hpp"

namespace kaonlab {

// |cos ab - cos ac| + |cos db + cos(-ab + ac + db)|, bound 2 for local
// realistic theories, 2 sqrt2 for quantum mechanics.
double s_photon(double phi_ab, double phi_ac, double phi_db);

// Times of the strangeness CHSH function in the angle chart
// phi_xy = dm (t_y - t_x): t_b = t_a + phi_ab/dm, t_c = t_a + phi_ac/dm,
// t_d = t_b - phi_db/dm. Empty when any time is negative.
struct StrangenessTimes {
  double t_a, t_b, t_c, t_d;
};
std::optional<StrangenessTimes> strangeness_times(double t_a, double phi_ab, double phi_ac,
                                                  double phi_db,
                                                  const PhysicalConstants& constants);

// Kaon CHSH function for equal strangeness on all four detectors, damped by
// exp(-gamma (t_x + t_y)) with gamma = (gamma_S + gamma_L)/2 from the
// constants' decay mode. Throws MathError for negative derived times.
double s_kaon_strangeness(double t_a, double phi_ab, double phi_ac, double phi_db,
                          const PhysicalConstants& constants);
std::optional<double> try_s_kaon_strangeness(double t_a, double phi_ab, double phi_ac,
                                             double phi_db,
                                             const PhysicalConstants& constants);

// M = P(YY) + P(NN) - P(YN) - P(NY) = -1 + 2 (P(YY) + P(NN)).
double expectation_qm(const QuasiSpinState& k_n, double t_a, const QuasiSpinState& k_m,
                      double t_b, const PhysicalConstants& constants);

// Detector settings: left side measures k_n at t_a and k_m' at t_d, right side
// k_m at t_b and k_n' at t_c.
struct ChshSetting {
  QuasiSpinState k_n;
  QuasiSpinState k_m;
  QuasiSpinState k_n_prime;
  QuasiSpinState k_m_prime;
  double t_a = 0.0;
  double t_b = 0.0;
  double t_c = 0.0;
  double t_d = 0.0;
};

// Probability form of the generalized CHSH function,
//   |A(n a; m b) - A(n a; n' c)| + |-1 + A(m' d; m b) + A(m' d; n' c)|,
// A = P(YY) + P(NN). Local realism bounds it by 1.
double s_generalized(const ChshSetting& setting, const PhysicalConstants& constants);

// The same quantity in the correlation form |M - M| + |M + M| (bound 2);
// exactly twice s_generalized.
double s_generalized_correlation_form(const ChshSetting& setting,
                                      const PhysicalConstants& constants);

inline constexpr double kLocalBoundCorrelation = 2.0;
inline constexpr double kLocalBoundProbability = 1.0;

// --- maximization ---------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct MaximizeOptions {
  int grid_steps = 32;   // per dimension
  int refine_iters = 2000;
  int seeds = 5;         // best grid points used as refinement starts
  int threads = 0;       // 0: hardware concurrency
};

struct MaximizationReport {
  double best_value = 0.0;
  std::vector<double> argmax;
  double best_grid_value = 0.0;
  std::vector<double> seed_values;  // refined maximum reached from each seed
  int grid_steps = 0;
  int refine_iters = 0;
  long long evaluations = 0;
};

// Objective returning nullopt outside its domain.
using Objective = std::function<std::optional<double>(std::span<const double>)>;

// Full grid scan over the box followed by bounded Nelder-Mead refinement from
// the `seeds` best grid points. Deterministic for given inputs.
MaximizationReport maximize(const Objective& objective, std::span<const Interval> bounds,
                            const MaximizeOptions& options = {});

enum class ChshFunction { photon, kaon_strangeness, generalized_restricted };

std::string_view to_string(ChshFunction f);
ChshFunction parse_chsh_function(std::string_view text);

// Default search box: photon [0, 2pi]^3; kaon_strangeness t_a in [0, 4] and
// angles in [0, 2pi]^3; generalized_restricted (all detectors K0bar, the four
// times as parameters) [0, 4]^4.
std::vector<Interval> default_bounds(ChshFunction f);

MaximizationReport maximize_s(ChshFunction f, std::span<const Interval> bounds,
                              const MaximizeOptions& options,
                              const PhysicalConstants& constants);

}  // namespace kaonlab
