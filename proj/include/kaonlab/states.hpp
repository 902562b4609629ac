#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "kaonlab/constants.hpp"
#include "kaonlab/errors.hpp"

namespace kaonlab {

enum class StateKind { k0, k0bar, ks, kl, k1, k2 };

std::string_view to_string(StateKind kind);
StateKind parse_state_kind(std::string_view text);

// A quasi-spin state: coefficients over the strangeness basis {K0, K0bar}.
template <typename Scalar>
class BasicQuasiSpinState {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, 2, 1>;

  BasicQuasiSpinState() : coeffs_(Complex(1), Complex(0)) {}

  // Normalizes the coefficients. A zero vector is rejected.
  BasicQuasiSpinState(Complex c_k0, Complex c_k0bar, std::string label = {})
      : coeffs_(c_k0, c_k0bar), label_(std::move(label)) {
    const Scalar n = coeffs_.norm();
    if (!(n > Scalar(0)) || !std::isfinite(static_cast<double>(n))) {
      throw MathError("quasi-spin state needs a non-zero finite coefficient vector");
    }
    coeffs_ /= n;
  }

  // Stores the coefficients as given. Consumers check `is_normalized()`.
  static BasicQuasiSpinState raw(Complex c_k0, Complex c_k0bar,
                                 std::string label = {}) {
    BasicQuasiSpinState s;
    s.coeffs_ = Vector(c_k0, c_k0bar);
    s.label_ = std::move(label);
    return s;
  }

  const Vector& coefficients() const { return coeffs_; }
  Complex c_k0() const { return coeffs_(0); }
  Complex c_k0bar() const { return coeffs_(1); }
  const std::string& label() const { return label_; }

  bool is_normalized(Scalar tol = Scalar(1e-12)) const {
    return std::abs(coeffs_.squaredNorm() - Scalar(1)) < tol;
  }

 private:
  Vector coeffs_;
  std::string label_;
};

using QuasiSpinState = BasicQuasiSpinState<double>;

// <a|b>, conjugate-linear in the first argument.
template <typename Scalar>
std::complex<Scalar> inner_product(const BasicQuasiSpinState<Scalar>& a,
                                   const BasicQuasiSpinState<Scalar>& b) {
  return a.coefficients().dot(b.coefficients());
}

// K_S = (p K0 - q K0bar)/N, K_L = (p K0 + q K0bar)/N with p = 1 + eps,
// q = 1 - eps. CP |K0> = -|K0bar>, so K1 = (K0 - K0bar)/sqrt2 is CP even.
QuasiSpinState named_state(StateKind kind, const PhysicalConstants& constants);

}  // namespace kaonlab
