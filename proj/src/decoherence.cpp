#include "kaonlab/decoherence.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kaonlab/errors.hpp"
#include "kaonlab/evolution.hpp"

namespace kaonlab {

std::string_view to_string(Basis basis) {
  return basis == Basis::mass ? "MASS" : "STRANGENESS";
}

Basis parse_basis(std::string_view text) {
  if (text == "MASS" || text == "mass" || text == "KSKL") return Basis::mass;
  if (text == "STRANGENESS" || text == "strangeness" || text == "K0K0bar") {
    return Basis::strangeness;
  }
  throw ConfigError("unknown basis '" + std::string(text) + "' (expected MASS or STRANGENESS)");
}

std::string_view to_string(FitMode mode) {
  return mode == FitMode::corrected_theory_scaling ? "corrected_theory_scaling" : "raw_model";
}

FitMode parse_fit_mode(std::string_view text) {
  if (text == "corrected_theory_scaling" || text == "scaling") {
    return FitMode::corrected_theory_scaling;
  }
  if (text == "raw_model" || text == "raw") return FitMode::raw_model;
  throw ConfigError("unknown fit mode '" + std::string(text) + "'");
}

namespace {

void check_inputs(double t_l, double t_r, double zeta, ZetaRange range) {
  if (!(t_l >= 0.0) || !(t_r >= 0.0) || !std::isfinite(t_l) || !std::isfinite(t_r)) {
    throw MathError("decoherence: times must be finite and non-negative");
  }
  if (!std::isfinite(zeta)) throw MathError("decoherence: zeta must be finite");
  if (range == ZetaRange::unit && (zeta < 0.0 || zeta > 1.0)) {
    throw MathError("decoherence: zeta outside [0, 1] without extended range");
  }
}

// Single-kaon strangeness amplitudes, CP conserving:
//   same(t) = <K0|K0(t)> = <K0bar|K0bar(t)> = (e_S + e_L)/2
//   flip(t) = <K0|K0bar(t)> = <K0bar|K0(t)> = (e_L - e_S)/2
struct StrangenessAmplitudes {
  std::complex<double> same;
  std::complex<double> flip;
};

StrangenessAmplitudes strangeness_amplitudes(double t, const PhysicalConstants& c) {
  const auto e_s = survival_amplitude(EigenLabel::S, t, c);
  const auto e_l = survival_amplitude(EigenLabel::L, t, c);
  return {0.5 * (e_s + e_l), 0.5 * (e_l - e_s)};
}

// Mass basis: (1/8){e^{-gS tl - gL tr} + e^{-gL tl - gS tr} + sign 2 (1-zeta) cos(dm dt) e^{-g(tl+tr)}}
double mass_basis_probability(double t_l, double t_r, double zeta, double sign,
                              const PhysicalConstants& c) {
  const DecayRates r = c.rates();
  return (std::exp(-r.gamma_s * t_l - r.gamma_l * t_r) +
          std::exp(-r.gamma_l * t_l - r.gamma_s * t_r) +
          sign * 2.0 * (1.0 - zeta) * std::cos(c.delta_m_unit() * (t_l - t_r)) *
              std::exp(-r.gamma() * (t_l + t_r))) /
         8.0;
}

// Strangeness basis: (1/2){|x1|^2 |y1|^2 + |x2|^2 |y2|^2 - 2 (1-zeta) Re(conj(x1 y1) x2 y2)}
// for the amplitude (x1 y1 - x2 y2)/sqrt2 of the chosen final state.
double strangeness_basis_probability(std::complex<double> x1, std::complex<double> y1,
                                     std::complex<double> x2, std::complex<double> y2,
                                     double zeta) {
  return 0.5 * (std::norm(x1) * std::norm(y1) + std::norm(x2) * std::norm(y2) -
                2.0 * (1.0 - zeta) * std::real(std::conj(x1 * y1) * x2 * y2));
}

}  // namespace

double modified_like_probability(Basis basis, double t_l, double t_r, double zeta,
                                 const PhysicalConstants& constants, ZetaRange range) {
  check_inputs(t_l, t_r, zeta, range);
  if (basis == Basis::mass) return mass_basis_probability(t_l, t_r, zeta, -1.0, constants);
  const auto l = strangeness_amplitudes(t_l, constants);
  const auto r = strangeness_amplitudes(t_r, constants);
  // <K0 K0|psi> = (same_l flip_r - flip_l same_r)/sqrt2
  return strangeness_basis_probability(l.same, r.flip, l.flip, r.same, zeta);
}

double modified_unlike_probability(Basis basis, double t_l, double t_r, double zeta,
                                   const PhysicalConstants& constants, ZetaRange range) {
  check_inputs(t_l, t_r, zeta, range);
  if (basis == Basis::mass) return mass_basis_probability(t_l, t_r, zeta, +1.0, constants);
  const auto l = strangeness_amplitudes(t_l, constants);
  const auto r = strangeness_amplitudes(t_r, constants);
  // <K0 K0bar|psi> = (same_l same_r - flip_l flip_r)/sqrt2
  return strangeness_basis_probability(l.same, r.same, l.flip, r.flip, zeta);
}

double modified_asymmetry(Basis basis, double t_l, double t_r, double zeta,
                          const PhysicalConstants& constants, ZetaRange range) {
  check_inputs(t_l, t_r, zeta, range);
  const double dt = t_l - t_r;
  if (basis == Basis::mass) return asymmetry_qm(dt, constants) * (1.0 - zeta);
  const double dm = constants.delta_m_unit();
  const double half_dg = 0.5 * constants.rates().delta_gamma();
  const double sum = t_l + t_r;
  const double num = std::cos(dm * dt) - 0.5 * zeta * (std::cos(dm * dt) - std::cos(dm * sum));
  const double den =
      std::cosh(half_dg * dt) - 0.5 * zeta * (std::cosh(half_dg * dt) - std::cosh(half_dg * sum));
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

// --- fit -------------------------------------------------------------------

double fit_model(const AsymmetryPoint& p, Basis basis, FitMode mode, double zeta,
                 const PhysicalConstants& constants) {
  const double a = modified_asymmetry(basis, p.t_l, p.t_r, zeta, constants, ZetaRange::extended);
  if (mode == FitMode::raw_model) return a;
  if (basis == Basis::mass) return *p.corrected_theory * (1.0 - zeta);
  const double a0 = modified_asymmetry(basis, p.t_l, p.t_r, 0.0, constants);
  if (a0 == 0.0) throw MathError("fit: zero quantum asymmetry at point '" + p.label + "'");
  return *p.corrected_theory * a / a0;
}

double chi_square(std::span<const AsymmetryPoint> points, Basis basis, FitMode mode, double zeta,
                  const PhysicalConstants& constants) {
  double chi2 = 0.0;
  for (const auto& p : points) {
    const double r = (p.measured - fit_model(p, basis, mode, zeta, constants)) / p.sigma;
    chi2 += r * r;
  }
  return std::isfinite(chi2) ? chi2 : std::numeric_limits<double>::infinity();
}

namespace {

void validate_points(std::span<const AsymmetryPoint> points, FitMode mode) {
  if (points.empty()) throw DataError(DataError::Kind::no_data, "fit_zeta: no data points");
  for (const auto& p : points) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
      throw DataError(DataError::Kind::bad_sigma,
                      "fit_zeta: sigma must be positive at point '" + p.label + "'");
    }
    if (mode == FitMode::corrected_theory_scaling && !p.corrected_theory) {
      throw DataError(DataError::Kind::missing_theory,
                      "fit_zeta: point '" + p.label + "' lacks corrected_theory");
    }
  }
}

template <typename F>
double golden_section_min(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

// Distance from zeta_hat to the delta chi2 = 1 crossing in direction `dir`.
// Returns {distance, open} where open means no crossing inside [lo, hi].
std::pair<double, bool> crossing(const auto& chi2, double zeta_hat, double target, double dir,
                                 double lo, double hi, double tol) {
  constexpr double kStep = 1e-3;
  double inside = zeta_hat;
  for (int k = 1;; ++k) {
    const double z = zeta_hat + dir * kStep * k;
    if (z < lo || z > hi) return {std::abs(inside - zeta_hat), true};
    const double v = chi2(z);
    if (!std::isfinite(v)) return {std::abs(inside - zeta_hat), true};
    if (v >= target) {
      double a = inside;
      double b = z;
      while (std::abs(b - a) > tol) {
        const double m = 0.5 * (a + b);
        (chi2(m) >= target ? b : a) = m;
      }
      return {std::abs(0.5 * (a + b) - zeta_hat), false};
    }
    inside = z;
  }
}

}  // namespace

FitResult fit_zeta(std::span<const AsymmetryPoint> points, Basis basis, FitMode mode,
                   const PhysicalConstants& constants, const FitOptions& options) {
  validate_points(points, mode);
  if (!(options.zeta_lo < options.zeta_hi)) throw MathError("fit_zeta: empty zeta range");

  const auto chi2 = [&](double z) { return chi_square(points, basis, mode, z, constants); };

  // Coarse scan, then golden section inside the bracket around the best node.
  constexpr int kScan = 300;
  const double h = (options.zeta_hi - options.zeta_lo) / kScan;
  int best = 0;
  double best_value = chi2(options.zeta_lo);
  for (int k = 1; k <= kScan; ++k) {
    const double v = chi2(options.zeta_lo + h * k);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const double lo = options.zeta_lo + h * std::max(0, best - 1);
  const double hi = options.zeta_lo + h * std::min(kScan, best + 1);
  double zeta_hat = golden_section_min(chi2, lo, hi, options.tolerance);
  if (chi2(options.zeta_lo) <= chi2(zeta_hat)) zeta_hat = options.zeta_lo;
  if (chi2(options.zeta_hi) < chi2(zeta_hat)) zeta_hat = options.zeta_hi;

  FitResult result;
  result.basis = basis;
  result.mode = mode;
  result.zeta_hat = zeta_hat;
  result.chi2_min = chi2(zeta_hat);
  result.ndf = int(points.size()) - 1;

  const double target = result.chi2_min + 1.0;
  const auto [minus, open_low] = crossing(chi2, zeta_hat, target, -1.0, options.interval_lo,
                                          options.interval_hi, options.tolerance);
  const auto [plus, open_high] = crossing(chi2, zeta_hat, target, +1.0, options.interval_lo,
                                          options.interval_hi, options.tolerance);
  result.sigma_minus = minus;
  result.sigma_plus = plus;
  result.interval_open_low = open_low;
  result.interval_open_high = open_high;

  if (basis == Basis::mass) {
    // model_i = a_i (1 - zeta): u = sum(a d / s^2) / sum(a^2 / s^2), zeta = 1 - u
    double num = 0.0;
    double den = 0.0;
    for (const auto& p : points) {
      const double a = mode == FitMode::corrected_theory_scaling
                           ? *p.corrected_theory
                           : asymmetry_qm(p.t_l - p.t_r, constants);
      num += a * p.measured / (p.sigma * p.sigma);
      den += a * a / (p.sigma * p.sigma);
    }
    if (den > 0.0) result.closed_form_zeta = 1.0 - num / den;
  }
  return result;
}

// --- I/O -------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? std::string{} : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, int lineno, const char* column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v)) {
    throw DataError(DataError::Kind::parse, "csv line " + std::to_string(lineno) + ": bad " +
                                                column + " value '" + cell + "'");
  }
  return v;
}

}  // namespace

std::vector<AsymmetryPoint> read_asymmetry_csv(std::istream& in) {
  static const std::vector<std::string> kHeader{"label", "t_l",   "t_r",
                                                "measured", "sigma", "corrected_theory"};
  std::vector<AsymmetryPoint> points;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (!header_seen) {
      if (cells != kHeader) {
        throw DataError(DataError::Kind::parse,
                        "csv: expected header label,t_l,t_r,measured,sigma,corrected_theory");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != kHeader.size()) {
      throw DataError(DataError::Kind::parse,
                      "csv line " + std::to_string(lineno) + ": expected 6 columns");
    }
    AsymmetryPoint p;
    p.label = cells[0];
    p.t_l = parse_number(cells[1], lineno, "t_l");
    p.t_r = parse_number(cells[2], lineno, "t_r");
    p.measured = parse_number(cells[3], lineno, "measured");
    p.sigma = parse_number(cells[4], lineno, "sigma");
    if (!cells[5].empty()) p.corrected_theory = parse_number(cells[5], lineno, "corrected_theory");
    if (p.t_l < 0.0 || p.t_r < 0.0) {
      throw DataError(DataError::Kind::parse,
                      "csv line " + std::to_string(lineno) + ": negative time");
    }
    if (p.measured < -1.5 || p.measured > 1.5) {
      throw DataError(DataError::Kind::parse,
                      "csv line " + std::to_string(lineno) + ": measured outside [-1.5, 1.5]");
    }
    if (!(p.sigma > 0.0)) {
      throw DataError(DataError::Kind::bad_sigma,
                      "csv line " + std::to_string(lineno) + ": sigma must be positive");
    }
    points.push_back(std::move(p));
  }
  if (!header_seen) throw DataError(DataError::Kind::no_data, "csv: empty file");
  if (points.empty()) throw DataError(DataError::Kind::no_data, "csv: no data rows");
  return points;
}

std::vector<AsymmetryPoint> read_asymmetry_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::io, "cannot open " + path.string());
  return read_asymmetry_csv(in);
}

std::string fit_result_json(const FitResult& r) {
  nlohmann::ordered_json j;
  j["basis"] = std::string(to_string(r.basis));
  j["mode"] = std::string(to_string(r.mode));
  j["zeta_hat"] = r.zeta_hat;
  j["sigma_minus"] = r.sigma_minus;
  j["sigma_plus"] = r.sigma_plus;
  j["chi2_min"] = r.chi2_min;
  j["ndf"] = r.ndf;
  j["interval_open_low"] = r.interval_open_low;
  j["interval_open_high"] = r.interval_open_high;
  if (r.closed_form_zeta) {
    j["closed_form_zeta"] = *r.closed_form_zeta;
  } else {
    j["closed_form_zeta"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace kaonlab
