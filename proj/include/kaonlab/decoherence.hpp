#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kaonlab/constants.hpp"

// Decoherence model: the interference term of the two-kaon amplitude in a
// chosen basis is multiplied by (1 - zeta). zeta = 0 is quantum mechanics,
// zeta = 1 is spontaneous factorization in that basis. CP violation is
// neglected throughout.
namespace kaonlab {

enum class Basis { mass, strangeness };

std::string_view to_string(Basis basis);
Basis parse_basis(std::string_view text);

enum class ZetaRange {
  unit,      // zeta in [0, 1]
  extended,  // any finite zeta, used by the fit
};

double modified_like_probability(Basis basis, double t_l, double t_r, double zeta,
                                 const PhysicalConstants& constants,
                                 ZetaRange range = ZetaRange::unit);
double modified_unlike_probability(Basis basis, double t_l, double t_r, double zeta,
                                   const PhysicalConstants& constants,
                                   ZetaRange range = ZetaRange::unit);

// (unlike - like)/(unlike + like) in closed form. Mass basis: A_QM(dt)(1-zeta).
// Strangeness basis depends on t_l + t_r as well and is nonlinear in zeta.
double modified_asymmetry(Basis basis, double t_l, double t_r, double zeta,
                          const PhysicalConstants& constants,
                          ZetaRange range = ZetaRange::unit);

struct AsymmetryPoint {
  std::string label;
  double t_l = 0.0;  // tau_S units
  double t_r = 0.0;
  double measured = 0.0;
  double sigma = 0.0;
  std::optional<double> corrected_theory;
};

enum class FitMode {
  // model_i = corrected_theory_i * A_zeta(t_i) / A_0(t_i); in the mass basis
  // this is corrected_theory_i * (1 - zeta).
  corrected_theory_scaling,
  raw_model,
};

std::string_view to_string(FitMode mode);
FitMode parse_fit_mode(std::string_view text);

struct FitOptions {
  double zeta_lo = 0.0;
  double zeta_hi = 1.5;
  double tolerance = 1e-10;
  // Range searched for the delta chi2 = 1 crossings.
  double interval_lo = -1.0;
  double interval_hi = 2.0;
};

struct FitResult {
  double zeta_hat = 0.0;
  double sigma_minus = 0.0;
  double sigma_plus = 0.0;
  double chi2_min = 0.0;
  int ndf = 0;
  Basis basis = Basis::mass;
  FitMode mode = FitMode::corrected_theory_scaling;
  // Set when a delta chi2 = 1 crossing lies outside the interval search range;
  // the corresponding sigma is then only a lower bound.
  bool interval_open_low = false;
  bool interval_open_high = false;
  // Weighted linear least squares solution, when the model is linear in zeta.
  std::optional<double> closed_form_zeta;
};

double fit_model(const AsymmetryPoint& point, Basis basis, FitMode mode, double zeta,
                 const PhysicalConstants& constants);
double chi_square(std::span<const AsymmetryPoint> points, Basis basis, FitMode mode,
                  double zeta, const PhysicalConstants& constants);

FitResult fit_zeta(std::span<const AsymmetryPoint> points, Basis basis, FitMode mode,
                   const PhysicalConstants& constants, const FitOptions& options = {});

// CSV with header `label,t_l,t_r,measured,sigma,corrected_theory`; the last
// column may be empty. `#` lines are comments.
std::vector<AsymmetryPoint> read_asymmetry_csv(std::istream& in);
std::vector<AsymmetryPoint> read_asymmetry_csv(const std::filesystem::path& path);

std::string fit_result_json(const FitResult& result);

}  // namespace kaonlab
