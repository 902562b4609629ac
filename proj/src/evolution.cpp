#include "kaonlab/evolution.hpp"

#include <array>
#include <cmath>
#include <string>

#include "kaonlab/errors.hpp"

namespace kaonlab {

namespace {

constexpr std::array<EigenLabel, 2> kLabels{EigenLabel::S, EigenLabel::L};

void require_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw MathError(std::string(what) + ": time must be finite and non-negative");
  }
}

}  // namespace

ComplexEigenvalue eigenvalue(EigenLabel label, const PhysicalConstants& constants) {
  const DecayRates rates = constants.rates();
  if (label == EigenLabel::S) return {0.0, rates.gamma_s};
  return {constants.delta_m_unit(), rates.gamma_l};
}

QuasiSpinState mass_eigenstate(EigenLabel label, const PhysicalConstants& constants) {
  return named_state(label == EigenLabel::S ? StateKind::ks : StateKind::kl, constants);
}

std::complex<double> survival_amplitude(EigenLabel label, double t,
                                        const PhysicalConstants& constants) {
  require_time(t, "survival_amplitude");
  const std::complex<double> i(0.0, 1.0);
  return std::exp(-i * eigenvalue(label, constants).value() * t);
}

namespace {

// Quantities of the {K_S, K_L} basis shared by every Gram matrix evaluation.
struct MassBasis {
  std::array<Eigen::Vector2cd, 2> states;
  std::array<std::complex<double>, 2> lambda;
  Eigen::Matrix2cd gram;  // <K_a|K_b>

  explicit MassBasis(const PhysicalConstants& c) {
    for (int a = 0; a < 2; ++a) {
      states[a] = mass_eigenstate(kLabels[a], c).coefficients();
      lambda[a] = eigenvalue(kLabels[a], c).value();
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) gram(a, b) = states[a].dot(states[b]);
  }

  std::complex<double> amplitude(int a, double t) const {
    return std::exp(-std::complex<double>(0.0, 1.0) * lambda[a] * t);
  }

  std::complex<double> omega(int a, int b, double t) const {
    const std::complex<double> i(0.0, 1.0);
    return gram(a, b) * (1.0 - std::exp(i * (std::conj(lambda[a]) - lambda[b]) * t));
  }
};

Eigen::Matrix2cd side_gram_impl(const MassBasis& basis, const QuasiSpinState& k,
                                Outcome outcome, double t) {
  std::array<std::complex<double>, 2> amp{};
  std::array<std::complex<double>, 2> proj{};  // <k|K_a>
  for (int a = 0; a < 2; ++a) {
    amp[a] = basis.amplitude(a, t);
    proj[a] = k.coefficients().dot(basis.states[a]);
  }
  Eigen::Matrix2cd g;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto phase = std::conj(amp[a]) * amp[b];
      const auto yes = std::conj(proj[a]) * proj[b];
      if (outcome == Outcome::yes) {
        g(a, b) = phase * yes;
      } else {
        g(a, b) = phase * (basis.gram(a, b) - yes) + basis.omega(a, b, t);
      }
    }
  }
  return g;
}

}  // namespace

std::complex<double> omega_overlap(EigenLabel a, EigenLabel b, double t,
                                   const PhysicalConstants& constants) {
  require_time(t, "omega_overlap");
  const MassBasis basis(constants);
  return basis.omega(a == EigenLabel::S ? 0 : 1, b == EigenLabel::S ? 0 : 1, t);
}

namespace {

// (1/8){e^{-gS tl - gL tr} + e^{-gL tl - gS tr} + sign 2 cos(dm dt) e^{-g(tl+tr)}}
double strangeness_pair(double t_l, double t_r, double sign, const PhysicalConstants& c) {
  require_time(t_l, "joint strangeness probability");
  require_time(t_r, "joint strangeness probability");
  const DecayRates r = c.rates();
  const double dt = t_l - t_r;
  return (std::exp(-r.gamma_s * t_l - r.gamma_l * t_r) +
          std::exp(-r.gamma_l * t_l - r.gamma_s * t_r) +
          sign * 2.0 * std::cos(c.delta_m_unit() * dt) * std::exp(-r.gamma() * (t_l + t_r))) /
         8.0;
}

}  // namespace

double joint_like_probability(double t_l, double t_r, const PhysicalConstants& constants) {
  return clip_probability(strangeness_pair(t_l, t_r, -1.0, constants));
}

double joint_unlike_probability(double t_l, double t_r, const PhysicalConstants& constants) {
  return clip_probability(strangeness_pair(t_l, t_r, +1.0, constants));
}

double asymmetry_qm(double delta_t, const PhysicalConstants& constants) {
  const DecayRates r = constants.rates();
  return std::cos(constants.delta_m_unit() * delta_t) /
         std::cosh(0.5 * r.delta_gamma() * delta_t);
}

double JointOutcomeTable::probability(Outcome l, Outcome r) const {
  if (l == Outcome::yes) return r == Outcome::yes ? p_yy : p_yn;
  return r == Outcome::yes ? p_ny : p_nn;
}

Eigen::Matrix2cd side_gram(const QuasiSpinState& k, Outcome outcome, double t,
                           const PhysicalConstants& constants) {
  require_time(t, "side_gram");
  return side_gram_impl(MassBasis(constants), k, outcome, t);
}

JointOutcomeTable joint_outcome_table(const QuasiSpinState& left, double t_l,
                                      const QuasiSpinState& right, double t_r,
                                      const PhysicalConstants& constants) {
  require_time(t_l, "joint_outcome_table");
  require_time(t_r, "joint_outcome_table");
  if (!left.is_normalized() || !right.is_normalized()) {
    throw MathError("joint_outcome_table: states must be normalized");
  }

  // psi ~ sum_ab C_ab (U K_a)_l (x) (U K_b)_r  with  C = [[0, 1], [-1, 0]]
  Eigen::Matrix2cd coupling;
  coupling << 0.0, 1.0, -1.0, 0.0;

  const auto contract = [&](const Eigen::Matrix2cd& gl, const Eigen::Matrix2cd& gr) {
    const Eigen::Matrix2cd m = coupling.adjoint() * gl * coupling;
    return m.cwiseProduct(gr).sum().real();
  };

  const MassBasis basis(constants);
  const double norm = contract(basis.gram, basis.gram);

  const Eigen::Matrix2cd ly = side_gram_impl(basis, left, Outcome::yes, t_l);
  const Eigen::Matrix2cd ln = side_gram_impl(basis, left, Outcome::no, t_l);
  const Eigen::Matrix2cd ry = side_gram_impl(basis, right, Outcome::yes, t_r);
  const Eigen::Matrix2cd rn = side_gram_impl(basis, right, Outcome::no, t_r);

  JointOutcomeTable table;
  table.p_yy = clip_probability(contract(ly, ry) / norm);
  table.p_yn = clip_probability(contract(ly, rn) / norm);
  table.p_ny = clip_probability(contract(ln, ry) / norm);
  table.p_nn = clip_probability(contract(ln, rn) / norm);
  table.left = left;
  table.t_l = t_l;
  table.right = right;
  table.t_r = t_r;
  return table;
}

double clip_probability(double p) {
  constexpr double kSlack = 1e-12;
  if (!std::isfinite(p) || p < -kSlack || p > 1.0 + kSlack) {
    throw MathError("probability out of range: " + std::to_string(p));
  }
  if (p < 0.0) return 0.0;
  if (p > 1.0) return 1.0;
  return p;
}

}  // namespace kaonlab
