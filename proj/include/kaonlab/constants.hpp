#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>

namespace kaonlab {

// Which decay widths enter the dynamics. `no_long_lived` sets gamma_L = 0,
// `none` switches off both widths (pure strangeness oscillation).
enum class DecayMode { full, no_long_lived, none };

std::string_view to_string(DecayMode mode);
DecayMode parse_decay_mode(std::string_view text);

// Decay widths in units of 1/tau_S, after the decay mode has been applied.
struct DecayRates {
  double gamma_s = 0.0;
  double gamma_l = 0.0;

  double gamma() const { return 0.5 * (gamma_s + gamma_l); }
  double delta_gamma() const { return gamma_l - gamma_s; }
};

// Experimental inputs of the neutral kaon system. Stored in SI units; every
// other module works in dimensionless multiples of tau_S and reads the
// converted quantities through `rates()` and `delta_m_unit()`.
class PhysicalConstants {
 public:
  PhysicalConstants(double tau_s, double tau_l, double delta_m,
                    std::complex<double> epsilon,
                    DecayMode mode = DecayMode::full);

  double tau_s() const { return tau_s_; }
  double tau_l() const { return tau_l_; }
  double delta_m() const { return delta_m_; }
  std::complex<double> epsilon() const { return epsilon_; }
  DecayMode decay_mode() const { return mode_; }

  // Nominal SI rates [1/s]; independent of the decay mode.
  double gamma_s() const { return 1.0 / tau_s_; }
  double gamma_l() const { return 1.0 / tau_l_; }
  double gamma() const { return 0.5 * (gamma_s() + gamma_l()); }
  double delta_gamma() const { return gamma_l() - gamma_s(); }
  // 2 dm / gamma_S
  double x() const { return 2.0 * delta_m_ / gamma_s(); }

  // Dimensionless (tau_S units).
  DecayRates rates() const;
  double delta_m_unit() const { return delta_m_ * tau_s_; }

  double to_time_units(double seconds) const { return seconds / tau_s_; }
  double to_seconds(double time_units) const { return time_units * tau_s_; }

  PhysicalConstants with_epsilon(std::complex<double> epsilon) const;
  PhysicalConstants with_decay_mode(DecayMode mode) const;

 private:
  double tau_s_;
  double tau_l_;
  double delta_m_;
  std::complex<double> epsilon_;
  DecayMode mode_;
};

inline constexpr double kDefaultTauS = 0.8935e-10;
inline constexpr double kDefaultTauL = 5.17e-8;
inline constexpr double kDefaultDeltaM = 0.5300e10;
inline constexpr double kDefaultEpsilonAbs = 2.23e-3;
inline constexpr double kDefaultEpsilonPhaseDeg = 45.0;

std::complex<double> epsilon_from_polar(double abs, double phase_deg);

PhysicalConstants default_constants();

// Applies `key = value` overrides on top of `base`. Recognised keys: tau_s,
// tau_l, delta_m, epsilon_abs, epsilon_phase_deg, decay_mode. Blank lines and
// `#` comments are ignored. Throws ConfigError on anything else.
PhysicalConstants apply_config(std::string_view text,
                               const PhysicalConstants& base);
PhysicalConstants load_config(const std::filesystem::path& path,
                              const PhysicalConstants& base);

}  // namespace kaonlab
