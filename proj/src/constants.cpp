#include "kaonlab/constants.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kaonlab/errors.hpp"
#include "kaonlab/states.hpp"

namespace kaonlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value) {
  std::string buf(value);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + std::string(key) + "' is not a number: " + buf);
  }
  if (used != buf.size() || !std::isfinite(v)) {
    throw ConfigError("config: '" + std::string(key) + "' is not a number: " + buf);
  }
  return v;
}

}  // namespace

std::string_view to_string(DecayMode mode) {
  switch (mode) {
    case DecayMode::full: return "full";
    case DecayMode::no_long_lived: return "no_long_lived";
    case DecayMode::none: return "none";
  }
  return "full";
}

DecayMode parse_decay_mode(std::string_view text) {
  if (text == "full") return DecayMode::full;
  if (text == "no_long_lived") return DecayMode::no_long_lived;
  if (text == "none") return DecayMode::none;
  throw ConfigError("unknown decay mode '" + std::string(text) + "'");
}

PhysicalConstants::PhysicalConstants(double tau_s, double tau_l, double delta_m,
                                     std::complex<double> epsilon, DecayMode mode)
    : tau_s_(tau_s), tau_l_(tau_l), delta_m_(delta_m), epsilon_(epsilon), mode_(mode) {
  if (!(tau_s > 0.0) || !(tau_l > 0.0)) {
    throw ConfigError("lifetimes must be positive");
  }
  if (!(tau_l > tau_s)) {
    throw ConfigError("tau_L must exceed tau_S");
  }
  if (!std::isfinite(delta_m) || !std::isfinite(tau_l)) {
    throw ConfigError("constants must be finite");
  }
  if (!(std::abs(epsilon) < 0.1)) {
    throw ConfigError("|epsilon| must be below 0.1");
  }
}

DecayRates PhysicalConstants::rates() const {
  switch (mode_) {
    case DecayMode::full: return {1.0, tau_s_ / tau_l_};
    case DecayMode::no_long_lived: return {1.0, 0.0};
    case DecayMode::none: return {0.0, 0.0};
  }
  return {1.0, tau_s_ / tau_l_};
}

PhysicalConstants PhysicalConstants::with_epsilon(std::complex<double> epsilon) const {
  return PhysicalConstants(tau_s_, tau_l_, delta_m_, epsilon, mode_);
}

PhysicalConstants PhysicalConstants::with_decay_mode(DecayMode mode) const {
  return PhysicalConstants(tau_s_, tau_l_, delta_m_, epsilon_, mode);
}

std::complex<double> epsilon_from_polar(double abs, double phase_deg) {
  return std::polar(abs, phase_deg * std::numbers::pi / 180.0);
}

PhysicalConstants default_constants() {
  return PhysicalConstants(kDefaultTauS, kDefaultTauL, kDefaultDeltaM,
                           epsilon_from_polar(kDefaultEpsilonAbs, kDefaultEpsilonPhaseDeg));
}

PhysicalConstants apply_config(std::string_view text, const PhysicalConstants& base) {
  double tau_s = base.tau_s();
  double tau_l = base.tau_l();
  double delta_m = base.delta_m();
  double eps_abs = std::abs(base.epsilon());
  double eps_phase = std::arg(base.epsilon()) * 180.0 / std::numbers::pi;
  DecayMode mode = base.decay_mode();

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key == "tau_s") {
      tau_s = parse_double(key, value);
    } else if (key == "tau_l") {
      tau_l = parse_double(key, value);
    } else if (key == "delta_m") {
      delta_m = parse_double(key, value);
    } else if (key == "epsilon_abs") {
      eps_abs = parse_double(key, value);
    } else if (key == "epsilon_phase_deg") {
      eps_phase = parse_double(key, value);
    } else if (key == "decay_mode") {
      mode = parse_decay_mode(value);
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  if (eps_abs < 0.0) throw ConfigError("epsilon_abs must be non-negative");
  return PhysicalConstants(tau_s, tau_l, delta_m, epsilon_from_polar(eps_abs, eps_phase), mode);
}

PhysicalConstants load_config(const std::filesystem::path& path, const PhysicalConstants& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return apply_config(buf.str(), base);
}

// --- states ---------------------------------------------------------------

std::string_view to_string(StateKind kind) {
  switch (kind) {
    case StateKind::k0: return "K0";
    case StateKind::k0bar: return "K0bar";
    case StateKind::ks: return "KS";
    case StateKind::kl: return "KL";
    case StateKind::k1: return "K1";
    case StateKind::k2: return "K2";
  }
  return "K0";
}

StateKind parse_state_kind(std::string_view text) {
  for (auto kind : {StateKind::k0, StateKind::k0bar, StateKind::ks, StateKind::kl,
                    StateKind::k1, StateKind::k2}) {
    if (text == to_string(kind)) return kind;
  }
  throw ConfigError("unknown state '" + std::string(text) +
                    "' (expected K0, K0bar, KS, KL, K1, K2)");
}

QuasiSpinState named_state(StateKind kind, const PhysicalConstants& constants) {
  using C = std::complex<double>;
  const C eps = constants.epsilon();
  const C p = 1.0 + eps;
  const C q = 1.0 - eps;
  const std::string label(to_string(kind));
  switch (kind) {
    case StateKind::k0: return QuasiSpinState(1.0, 0.0, label);
    case StateKind::k0bar: return QuasiSpinState(0.0, 1.0, label);
    case StateKind::ks: return QuasiSpinState(p, -q, label);
    case StateKind::kl: return QuasiSpinState(p, q, label);
    case StateKind::k1: return QuasiSpinState(1.0, -1.0, label);
    case StateKind::k2: return QuasiSpinState(1.0, 1.0, label);
  }
  return QuasiSpinState(1.0, 0.0, label);
}

}  // namespace kaonlab
