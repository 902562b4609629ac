#pragma once

#include <Eigen/Dense>
#include <complex>

#include "kaonlab/constants.hpp"
#include "kaonlab/states.hpp"

// Time evolution of single neutral kaons and of the antisymmetric pair.
// All times are in units of tau_S.
namespace kaonlab {

enum class EigenLabel { S, L };

// lambda = m - (i/2) gamma. Only dm enters physics, so m_S = 0, m_L = dm.
struct ComplexEigenvalue {
  double mass = 0.0;
  double width = 0.0;

  std::complex<double> value() const { return {mass, -0.5 * width}; }
};

ComplexEigenvalue eigenvalue(EigenLabel label, const PhysicalConstants& constants);

// Mass eigenstate |K_S> or |K_L> for the given epsilon.
QuasiSpinState mass_eigenstate(EigenLabel label, const PhysicalConstants& constants);

// exp(-i lambda t); |.|^2 = exp(-gamma t).
std::complex<double> survival_amplitude(EigenLabel label, double t,
                                        const PhysicalConstants& constants);

// <Omega_a(t)|Omega_b(t)> = <K_a|K_b> (1 - exp(i (conj(lambda_a) - lambda_b) t)),
// fixed by unitarity of U(t) on kaon space (+) decay-product space.
std::complex<double> omega_overlap(EigenLabel a, EigenLabel b, double t,
                                   const PhysicalConstants& constants);

// P(K0 t_l, K0 t_r) with CP violation neglected. The same expression is
// P(K0bar t_l, K0bar t_r); the total like-strangeness rate is twice this.
double joint_like_probability(double t_l, double t_r, const PhysicalConstants& constants);

// P(K0 t_l, K0bar t_r) = P(K0bar t_l, K0 t_r), CP violation neglected.
double joint_unlike_probability(double t_l, double t_r, const PhysicalConstants& constants);

// cos(dm dt) / cosh(dgamma dt / 2).
double asymmetry_qm(double delta_t, const PhysicalConstants& constants);

enum class Outcome { yes, no };

struct JointOutcomeTable {
  double p_yy = 0.0;
  double p_yn = 0.0;
  double p_ny = 0.0;
  double p_nn = 0.0;

  QuasiSpinState left;
  double t_l = 0.0;
  QuasiSpinState right;
  double t_r = 0.0;

  double total() const { return p_yy + p_yn + p_ny + p_nn; }
  double probability(Outcome l, Outcome r) const;
};

// One side's Gram matrix G_ab = <U K_a| A |U K_b> in the {K_S, K_L} index
// space, with A = |k><k| for `yes` and 1 - |k><k| for `no`. The `no` matrix
// carries the decay-product sector through omega_overlap.
Eigen::Matrix2cd side_gram(const QuasiSpinState& k, Outcome outcome, double t,
                           const PhysicalConstants& constants);

// Detection probabilities for state `left` at t_l and `right` at t_r on the
// unitarily evolved pair (K_S K_L - K_L K_S), normalized. CP violation is
// included.
JointOutcomeTable joint_outcome_table(const QuasiSpinState& left, double t_l,
                                      const QuasiSpinState& right, double t_r,
                                      const PhysicalConstants& constants);

// Maps values within 1e-12 below 0 (above 1) onto 0 (1); throws MathError for
// anything further out.
double clip_probability(double p);

}  // namespace kaonlab
